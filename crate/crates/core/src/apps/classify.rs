//! Nearest-neighbor classification in a truncated tensor subspace.
//!
//! Samples sit along the last mode. Fitting subtracts the mean sample, decomposes
//! the centered training tensor, and keeps the first `k` left singular slices `U_k`.
//! Training and test samples are projected as `U_kᵀ ⋆ A` and each test sample takes
//! the label of the nearest projected training sample in Frobenius distance, with
//! ties going to the lowest training index.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::apps::sample_rows;
use crate::decomp::{svd_transform, truncate};
use crate::error::{invalid, shape_err, Result};
use crate::products::{ProductKind, Spectrum};
use crate::tensor::DenseTensor;

#[derive(Clone, Debug)]
pub struct ClassifierModel {
    kind: ProductKind,
    mean: DenseTensor,
    uk: Spectrum,
    train_features: DenseTensor,
    train_rows: DMatrix<f64>,
    labels: Vec<usize>,
    k: usize,
}

/// Mean over the last mode, kept as a length-1 last mode.
fn sample_mean(t: &DenseTensor) -> Result<DenseTensor> {
    let n = t.shape()[t.order() - 1];
    let mut shape = t.shape().to_vec();
    *shape.last_mut().expect("order ≥ 1") = 1;
    let data = t
        .data()
        .chunks_exact(n)
        .map(|c| c.iter().sum::<f64>() / n as f64)
        .collect();
    DenseTensor::new(shape, data)
}

fn center(t: &DenseTensor, mean: &DenseTensor) -> Result<DenseTensor> {
    let n = t.shape()[t.order() - 1];
    let mut out = t.clone();
    for (chunk, m) in out.data_mut().chunks_exact_mut(n).zip(mean.data()) {
        chunk.iter_mut().for_each(|x| *x -= m);
    }
    Ok(out)
}

impl ClassifierModel {
    /// Fits on `train` (`I1 x ... x samples`) with one label per sample.
    pub fn fit(kind: ProductKind, train: &DenseTensor, labels: &[usize], k: usize) -> Result<Self> {
        if train.order() < 2 {
            return shape_err("training tensor needs order ≥ 2 with samples on the last mode");
        }
        let n = train.shape()[train.order() - 1];
        if labels.len() != n {
            return invalid(format!("{} labels for {n} training samples", labels.len()));
        }
        let kmax = train.shape()[0].min(n);
        if k == 0 || k > kmax {
            return invalid(format!("rank {k} out of range 1..={kmax}"));
        }
        let mean = sample_mean(train)?;
        let centered = center(train, &mean)?;
        let f = truncate(&svd_transform(kind, &centered)?, k)?;
        let uk = f.u().to_spectrum(kind)?;
        let train_features = project(&uk, kind, &centered)?;
        Ok(Self {
            kind,
            mean,
            train_rows: sample_rows(&train_features),
            uk,
            train_features,
            labels: labels.to_vec(),
            k,
        })
    }

    pub fn kind(&self) -> ProductKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mean(&self) -> &DenseTensor {
        &self.mean
    }

    /// Transform-domain projection basis `U_k`.
    pub fn basis(&self) -> &Spectrum {
        &self.uk
    }

    /// Projected training tensor `U_kᵀ ⋆ (A - mean)`, `k x ... x samples`.
    pub fn train_features(&self) -> &DenseTensor {
        &self.train_features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Projects centered samples: `U_kᵀ ⋆ (T - mean)`.
    pub fn project(&self, test: &DenseTensor) -> Result<DenseTensor> {
        let tshape = test.shape();
        let mshape = self.mean.shape();
        if tshape.len() != mshape.len() || tshape[..tshape.len() - 1] != mshape[..mshape.len() - 1] {
            return shape_err(format!(
                "test samples have shape {:?}, model expects {:?}",
                &tshape[..tshape.len().saturating_sub(1)],
                &mshape[..mshape.len() - 1]
            ));
        }
        project(&self.uk, self.kind, &center(test, &self.mean)?)
    }

    pub fn predict(&self, test: &DenseTensor) -> Result<Vec<usize>> {
        let rows = sample_rows(&self.project(test)?);
        Ok(nearest_labels(&self.train_rows, &self.labels, &rows))
    }
}

fn project(uk: &Spectrum, kind: ProductKind, centered: &DenseTensor) -> Result<DenseTensor> {
    uk.adjoint().mul(&Spectrum::forward(kind, centered)?)?.inverse()
}

/// For each row of `query`, the label of the nearest row of `train` (Euclidean),
/// ties to the lowest index.
pub fn nearest_labels(train: &DMatrix<f64>, labels: &[usize], query: &DMatrix<f64>) -> Vec<usize> {
    (0..query.nrows())
        .into_par_iter()
        .map(|q| {
            let row = query.row(q);
            let mut best = (f64::INFINITY, 0);
            for t in 0..train.nrows() {
                let d: f64 = train
                    .row(t)
                    .iter()
                    .zip(row.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d < best.0 {
                    best = (d, t);
                }
            }
            labels[best.1]
        })
        .collect()
}

/// Fraction of positions where the two label sequences agree.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    if pred.is_empty() {
        return 0.0;
    }
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / pred.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::synthetic::{blobs, gaussian};

    #[test]
    fn single_sample_projects_to_zero() {
        let a = gaussian(&[3, 2, 1], 1).unwrap();
        for kind in ProductKind::ALL {
            let m = ClassifierModel::fit(kind, &a, &[4], 1).unwrap();
            assert!(m.train_features().max_abs() < 1e-12);
            assert_eq!(m.predict(&a).unwrap(), vec![4]);
        }
    }

    #[test]
    fn full_rank_self_accuracy() {
        let a = gaussian(&[4, 3, 12], 2).unwrap();
        let labels: Vec<usize> = (0..12).map(|i| i % 3).collect();
        for kind in ProductKind::ALL {
            let m = ClassifierModel::fit(kind, &a, &labels, 4).unwrap();
            assert_eq!(m.predict(&a).unwrap(), labels);
        }
    }

    #[test]
    fn mean_goes_to_smallest_feature() {
        let a = gaussian(&[3, 2, 6], 3).unwrap();
        let labels = vec![0, 1, 2, 3, 4, 5];
        let m = ClassifierModel::fit(ProductKind::Tc, &a, &labels, 2).unwrap();
        let rows = sample_rows(m.train_features());
        let smallest = (0..6)
            .min_by(|&i, &j| rows.row(i).norm().total_cmp(&rows.row(j).norm()))
            .unwrap();
        assert_eq!(m.predict(m.mean()).unwrap(), vec![smallest]);
    }

    #[test]
    fn separable_blobs_classified() {
        let (a, y) = blobs(&[4, 4, 40], 2, 3.0, 5).unwrap();
        let (t, yt) = blobs(&[4, 4, 40], 2, 3.0, 5).unwrap();
        for kind in ProductKind::ALL {
            let m = ClassifierModel::fit(kind, &a, &y, 2).unwrap();
            assert_eq!(accuracy(&m.predict(&t).unwrap(), &yt), 1.0);
        }
    }

    #[test]
    fn fit_errors() {
        let a = gaussian(&[3, 2, 4], 1).unwrap();
        assert!(ClassifierModel::fit(ProductKind::Tc, &a, &[0, 1], 1).is_err());
        assert!(ClassifierModel::fit(ProductKind::Tc, &a, &[0; 4], 4).is_err());
        let m = ClassifierModel::fit(ProductKind::Tc, &a, &[0; 4], 2).unwrap();
        assert!(m.predict(&gaussian(&[2, 2, 4], 1).unwrap()).is_err());
    }
}
