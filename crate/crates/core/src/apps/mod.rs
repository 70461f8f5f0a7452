//! Compression, classification and clustering built on the decompositions.

pub mod classify;
pub mod cluster;
pub mod compress;

pub use classify::{accuracy, nearest_labels, ClassifierModel};
pub use cluster::{extract_features, kmeans, kmeans_with, nmi, FeatureMatrix};
pub use compress::{compress, decompress, psnr, CompressedArchive, Layout};

use nalgebra::DMatrix;

use crate::tensor::DenseTensor;

/// One row per sample (last mode), with the remaining modes flattened in canonical order.
pub fn sample_rows(t: &DenseTensor) -> DMatrix<f64> {
    let n = t.shape()[t.order() - 1];
    let d = t.len() / n;
    DMatrix::from_row_slice(d, n, t.data()).transpose()
}
