//! Transform-based tensor-tensor products.
//!
//! Both products move the operands into a transform domain over the middle modes,
//! multiply slice by slice, and transform back. The periodic product uses the DFT
//! and passes through complex values; the reflective product uses the scaled cosine
//! matrix `C` and stays real.
//!
//! [`Spectrum`] is the transform-domain representation. It is exposed so callers that
//! reuse an operand (projection bases, decomposition factors) transform it once.

use std::fmt;
use std::str::FromStr;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, shape_err, Error, Result};
use crate::tensor::{
    check_conformable, t_transpose, tc_transpose, ComplexTensor, DenseTensor, SliceStack,
};
use crate::transforms::{apply_cosine_modes, apply_fourier_modes, apply_fourier_modes_complex, CosineMatrix};

/// Which block-convolution product to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProductKind {
    /// Periodic boundary, diagonalized by the DFT.
    T,
    /// Reflective boundary, diagonalized by the scaled cosine transform.
    Tc,
}

impl ProductKind {
    pub const ALL: [ProductKind; 2] = [ProductKind::T, ProductKind::Tc];

    /// The product `a ⋆ x`.
    pub fn product(self, a: &DenseTensor, x: &DenseTensor) -> Result<DenseTensor> {
        match self {
            ProductKind::T => tproduct(a, x),
            ProductKind::Tc => tcproduct(a, x),
        }
    }

    /// The transpose matching this product, so that `⟨A ⋆ X, Y⟩ = ⟨X, Aᵀ ⋆ Y⟩`.
    pub fn transpose(self, a: &DenseTensor) -> Result<DenseTensor> {
        match self {
            ProductKind::T => t_transpose(a),
            ProductKind::Tc => tc_transpose(a),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProductKind::T => "t",
            ProductKind::Tc => "tc",
        }
    }
}

impl fmt::Display for ProductKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProductKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t" | "tproduct" | "t-product" => Ok(ProductKind::T),
            "tc" | "c" | "tcproduct" | "tc-product" => Ok(ProductKind::Tc),
            _ => invalid(format!("unknown product kind '{s}' (expected t or tc)")),
        }
    }
}

fn middle_modes(order: usize) -> Vec<usize> {
    if order <= 2 {
        Vec::new()
    } else {
        (2..order).collect()
    }
}

/// Transform-domain stack of `I_1 x I_N` slices, one per middle index.
#[derive(Clone, Debug, PartialEq)]
pub enum Spectrum {
    Cosine(SliceStack<f64>),
    Fourier(SliceStack<Complex64>),
}

fn mul_stacks<T: ComplexField + Copy>(a: &SliceStack<T>, b: &SliceStack<T>) -> SliceStack<T> {
    let slices = a
        .slices
        .par_iter()
        .zip(&b.slices)
        .map(|(x, y)| x * y)
        .collect();
    SliceStack::from_parts(a.middle.clone(), slices)
}

fn energy<T: ComplexField<RealField = f64> + Copy>(s: &SliceStack<T>) -> f64 {
    s.slices.iter().map(|m| m.norm_squared()).sum()
}

impl Spectrum {
    /// Transforms `t` over its middle modes.
    pub fn forward(kind: ProductKind, t: &DenseTensor) -> Result<Self> {
        if t.order() < 2 {
            return shape_err("products need tensors of order ≥ 2");
        }
        let modes = middle_modes(t.order());
        Ok(match kind {
            ProductKind::Tc => {
                let bar = apply_cosine_modes(t, &modes, CosineMatrix::C)?;
                Spectrum::Cosine(SliceStack::from_tensor(&bar)?)
            }
            ProductKind::T => {
                let bar = apply_fourier_modes(t, &modes, false)?;
                Spectrum::Fourier(SliceStack::from_complex_tensor(&bar)?)
            }
        })
    }

    pub fn kind(&self) -> ProductKind {
        match self {
            Spectrum::Cosine(_) => ProductKind::Tc,
            Spectrum::Fourier(_) => ProductKind::T,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            Spectrum::Cosine(s) => s.rows(),
            Spectrum::Fourier(s) => s.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Spectrum::Cosine(s) => s.cols(),
            Spectrum::Fourier(s) => s.cols(),
        }
    }

    pub fn middle_shape(&self) -> &[usize] {
        match self {
            Spectrum::Cosine(s) => s.middle_shape(),
            Spectrum::Fourier(s) => s.middle_shape(),
        }
    }

    /// Number of slices (product of the middle lengths).
    pub fn len(&self) -> usize {
        match self {
            Spectrum::Cosine(s) => s.len(),
            Spectrum::Fourier(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Shape of the spatial tensor this spectrum represents.
    pub fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.rows()];
        s.extend_from_slice(self.middle_shape());
        s.push(self.cols());
        s
    }

    /// Slice-wise matrix product `self[ī] · other[ī]`.
    pub fn mul(&self, other: &Spectrum) -> Result<Spectrum> {
        if self.middle_shape() != other.middle_shape() {
            return shape_err(format!(
                "spectra have different middle shapes ({:?} vs {:?})",
                self.middle_shape(),
                other.middle_shape()
            ));
        }
        if self.cols() != other.rows() {
            return shape_err(format!(
                "inner dimensions do not conform ({} vs {})",
                self.cols(),
                other.rows()
            ));
        }
        match (self, other) {
            (Spectrum::Cosine(a), Spectrum::Cosine(b)) => Ok(Spectrum::Cosine(mul_stacks(a, b))),
            (Spectrum::Fourier(a), Spectrum::Fourier(b)) => Ok(Spectrum::Fourier(mul_stacks(a, b))),
            _ => invalid("cannot multiply spectra of different product kinds"),
        }
    }

    /// Spectrum of the product-specific transpose: each slice is transposed
    /// (conjugate-transposed in the Fourier domain).
    pub fn adjoint(&self) -> Spectrum {
        match self {
            Spectrum::Cosine(s) => Spectrum::Cosine(SliceStack::from_parts(
                s.middle.clone(),
                s.slices.iter().map(|m| m.transpose()).collect(),
            )),
            Spectrum::Fourier(s) => Spectrum::Fourier(SliceStack::from_parts(
                s.middle.clone(),
                s.slices.iter().map(|m| m.adjoint()).collect(),
            )),
        }
    }

    /// Sum of squared Frobenius norms of all slices.
    pub fn energy(&self) -> f64 {
        match self {
            Spectrum::Cosine(s) => energy(s),
            Spectrum::Fourier(s) => energy(s),
        }
    }

    /// Squared Frobenius norm of each slice, in flat middle-index order.
    pub fn slice_energies(&self) -> Vec<f64> {
        match self {
            Spectrum::Cosine(s) => s.slices.iter().map(|m| m.norm_squared()).collect(),
            Spectrum::Fourier(s) => s.slices.iter().map(|m| m.norm_squared()).collect(),
        }
    }

    /// Inverse transform, also returning the Frobenius norm of the discarded
    /// imaginary part (always 0 for the cosine domain).
    pub fn inverse_with_residue(&self) -> Result<(DenseTensor, f64)> {
        let modes = middle_modes(self.middle_shape().len() + 2);
        match self {
            Spectrum::Cosine(s) => {
                let bar = s.to_tensor();
                Ok((apply_cosine_modes(&bar, &modes, CosineMatrix::Cinv)?, 0.0))
            }
            Spectrum::Fourier(s) => {
                let bar: ComplexTensor = s.to_complex_tensor();
                let y = apply_fourier_modes_complex(&bar, &modes, true)?;
                Ok((y.real_part(), y.imag_norm()))
            }
        }
    }

    pub fn inverse(&self) -> Result<DenseTensor> {
        Ok(self.inverse_with_residue()?.0)
    }

    /// The cosine-domain slices, if this is a reflective-product spectrum.
    pub fn as_cosine(&self) -> Option<&SliceStack<f64>> {
        match self {
            Spectrum::Cosine(s) => Some(s),
            Spectrum::Fourier(_) => None,
        }
    }

    /// The Fourier-domain slices, if this is a periodic-product spectrum.
    pub fn as_fourier(&self) -> Option<&SliceStack<Complex64>> {
        match self {
            Spectrum::Fourier(s) => Some(s),
            Spectrum::Cosine(_) => None,
        }
    }
}

fn fast_product(kind: ProductKind, a: &DenseTensor, x: &DenseTensor) -> Result<DenseTensor> {
    check_conformable(a, x, "product")?;
    let y = Spectrum::forward(kind, a)?.mul(&Spectrum::forward(kind, x)?)?;
    y.inverse()
}

/// Periodic-boundary product `A ⋆t X` through the DFT over the middle modes.
///
/// `a` is `I1 x I2 x ... x I_{N-1} x J` and `x` is `J x I2 x ... x I_{N-1} x I_N`.
pub fn tproduct(a: &DenseTensor, x: &DenseTensor) -> Result<DenseTensor> {
    fast_product(ProductKind::T, a, x)
}

/// Reflective-boundary product `A ⋆c X` through the scaled cosine transform over
/// the middle modes. No complex values are formed.
pub fn tcproduct(a: &DenseTensor, x: &DenseTensor) -> Result<DenseTensor> {
    fast_product(ProductKind::Tc, a, x)
}

/// The identity for either product: `E[:, 1, ..., 1, :] = I_n`, zero elsewhere.
///
/// The kind does not change the tensor (both transforms send a leading delta to the
/// all-ones vector) but is kept in the signature so call sites say which product
/// they mean.
pub fn identity_tensor(_kind: ProductKind, n: usize, middle: &[usize]) -> Result<DenseTensor> {
    if n == 0 {
        return invalid("identity size must be positive");
    }
    let mut shape = vec![n];
    shape.extend_from_slice(middle);
    shape.push(n);
    let mut e = DenseTensor::zeros(&shape)?;
    let mid: usize = middle.iter().product();
    // slice at the first middle index has flat offset 0
    for i in 0..n {
        e.data_mut()[(i * mid) * n + i] = 1.0;
    }
    Ok(e)
}

/// Builds a spectrum from real cosine-domain slices.
pub(crate) fn cosine_spectrum(middle: Vec<usize>, slices: Vec<DMatrix<f64>>) -> Spectrum {
    Spectrum::Cosine(SliceStack::from_parts(middle, slices))
}

/// Builds a spectrum from complex Fourier-domain slices.
pub(crate) fn fourier_spectrum(middle: Vec<usize>, slices: Vec<DMatrix<Complex64>>) -> Spectrum {
    Spectrum::Fourier(SliceStack::from_parts(middle, slices))
}
