//! Dense tensor algebra for two block-convolution products and their SVDs.
//!
//! * The t-product (periodic boundary) is diagonalized by the DFT along the middle
//!   modes `2..N-1`.
//! * The ⋆c-product (reflective boundary) is diagonalized by the scaled cosine
//!   transform `C = diag(c1)·C̄` and never leaves the reals.
//!
//! On top of the products sit the t-SVD and ⋆c-SVD for any order ≥ 2, truncation,
//! double filtering, compression archives, a subspace classifier, feature
//! extraction for clustering, file formats and a CLI.
//!
//! Tensors are stored with the last index varying fastest, and every public index
//! (element positions, mode numbers) is 1-based.
//!
//! ```
//! use tcsvd::io::synthetic::gaussian;
//! use tcsvd::{tcproduct, tcsvd, identity_tensor, ProductKind};
//!
//! let a = gaussian(&[4, 3, 5], 1).unwrap();
//! let f = tcsvd(&a).unwrap();
//! assert!(f.reconstruct().unwrap().rel_error(&a).unwrap() < 1e-10);
//!
//! let e = identity_tensor(ProductKind::Tc, 4, &[3]).unwrap();
//! let y = tcproduct(&e, &a).unwrap();
//! assert!(y.max_abs_diff(&a).unwrap() < 1e-12);
//! ```

pub mod apps;
pub mod cli;
pub mod decomp;
pub mod error;
pub mod io;
mod linalg;
pub mod oracle;
pub mod products;
pub mod tensor;
pub mod transforms;

pub use decomp::{double_filter, reconstruct, svd, tcsvd, truncate, tsvd, Domain, Factor, TcFactors};
pub use error::{Error, Result};
pub use products::{identity_tensor, tcproduct, tproduct, ProductKind, Spectrum};
pub use tensor::{
    contract, mode_n_product, slicewise_product, t_transpose, tc_transpose, ComplexTensor,
    DenseTensor, MiddleIndex,
};
pub use transforms::{dct_basis, DctBasis, GammaOperator};
