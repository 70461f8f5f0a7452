//! Diagonalizing transforms for the two block-convolution products.
//!
//! The reflective-boundary product is diagonalized by the scaled cosine matrix
//! `C = diag(c1) · C̄`, where `C̄` is the orthogonal type-II cosine matrix and
//! `c1 = 1 ./ C̄[:, 1]`. Its inverse is `C⁻¹ = C̄ᵀ · diag(1 ./ c1)`. The periodic
//! product is diagonalized by the DFT.
//!
//! Short modes use dense matrix-fiber products. Long modes go through a fast
//! DCT-II/DCT-III with the `c1` scaling applied explicitly on either side, since
//! `C` itself is not orthogonal.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustdct::{DctPlanner, TransformType2And3};
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, shape_err, Error, Result};
use crate::tensor::{map_fibers, mode_n_product, ComplexTensor, DenseTensor};

/// Mode lengths up to this use dense matrix products; longer modes use the fast path.
pub const DENSE_COSINE_MAX: usize = 64;

/// Which of the three cosine matrices to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosineMatrix {
    /// The orthogonal cosine matrix `C̄`.
    Cbar,
    /// The scaled matrix `C = diag(c1) · C̄`.
    C,
    /// `C⁻¹ = C̄ᵀ · diag(1 ./ c1)`.
    Cinv,
}

/// How a cosine transform is evaluated along a mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformPath {
    /// Dense for lengths ≤ [`DENSE_COSINE_MAX`], fast otherwise.
    Auto,
    Dense,
    Fast,
}

/// The cosine transform triple for one mode length.
#[derive(Clone, Debug)]
pub struct DctBasis {
    n: usize,
    cbar: DMatrix<f64>,
    c1: DVector<f64>,
    c: DMatrix<f64>,
    cinv: DMatrix<f64>,
}

/// Builds `C̄`, `c1`, `C` and `C⁻¹` for mode length `n` from the closed-form cosine entries.
pub fn dct_basis(n: usize) -> Result<DctBasis> {
    if n == 0 {
        return invalid("cosine basis length must be positive");
    }
    let nf = n as f64;
    let cbar = DMatrix::from_fn(n, n, |i, j| {
        let w = if i == 0 { 1.0 / nf } else { 2.0 / nf };
        w.sqrt() * ((i * (2 * j + 1)) as f64 * PI / (2.0 * nf)).cos()
    });
    let c1 = DVector::from_fn(n, |i, _| 1.0 / cbar[(i, 0)]);
    let c = DMatrix::from_fn(n, n, |i, j| c1[i] * cbar[(i, j)]);
    let cinv = DMatrix::from_fn(n, n, |i, j| cbar[(j, i)] / c1[j]);
    Ok(DctBasis {
        n,
        cbar,
        c1,
        c,
        cinv,
    })
}

impl DctBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cbar(&self) -> &DMatrix<f64> {
        &self.cbar
    }

    pub fn c1(&self) -> &DVector<f64> {
        &self.c1
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn cinv(&self) -> &DMatrix<f64> {
        &self.cinv
    }

    pub fn matrix(&self, which: CosineMatrix) -> &DMatrix<f64> {
        match which {
            CosineMatrix::Cbar => &self.cbar,
            CosineMatrix::C => &self.c,
            CosineMatrix::Cinv => &self.cinv,
        }
    }
}

/// Upper bidiagonal operator with unit diagonal and unit superdiagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaOperator {
    n: usize,
}

impl GammaOperator {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("Γ length must be positive");
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n {
            return shape_err(format!("vector length {} but Γ has size {}", v.len(), self.n));
        }
        Ok(())
    }

    /// `(v1+v2, v2+v3, ..., v_{n-1}+v_n, v_n)`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v)?;
        let mut out = v.to_vec();
        gamma_apply_in_place(&mut out);
        Ok(out)
    }

    /// Solves `Γ x = v` by back-substitution.
    pub fn solve(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v)?;
        let mut out = v.to_vec();
        gamma_solve_in_place(&mut out);
        Ok(out)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| if j == i || j == i + 1 { 1.0 } else { 0.0 })
    }
}

fn gamma_apply_in_place(v: &mut [f64]) {
    for i in 0..v.len().saturating_sub(1) {
        v[i] += v[i + 1];
    }
}

fn gamma_solve_in_place(v: &mut [f64]) {
    for i in (0..v.len().saturating_sub(1)).rev() {
        v[i] -= v[i + 1];
    }
}

fn sorted_modes(modes: &[usize], order: usize) -> Result<Vec<usize>> {
    let mut m = modes.to_vec();
    m.sort_unstable();
    m.dedup();
    for &k in &m {
        if k == 0 || k > order {
            return Err(Error::ModeOutOfRange { mode: k, order });
        }
    }
    Ok(m)
}

/// Applies `Γ` (or `Γ⁻¹`) along each listed mode.
pub fn apply_gamma_modes(t: &DenseTensor, modes: &[usize], inverse: bool) -> Result<DenseTensor> {
    let modes = sorted_modes(modes, t.order())?;
    let mut out = t.clone();
    let shape = t.shape().to_vec();
    for k in modes {
        map_fibers(out.data_mut(), &shape, k - 1, |fiber, _| {
            if inverse {
                gamma_solve_in_place(fiber)
            } else {
                gamma_apply_in_place(fiber)
            }
        });
    }
    Ok(out)
}

/// Applies the chosen cosine matrix along each listed mode, in ascending mode order.
pub fn apply_cosine_modes(
    t: &DenseTensor,
    modes: &[usize],
    which: CosineMatrix,
) -> Result<DenseTensor> {
    apply_cosine_modes_with(t, modes, which, TransformPath::Auto)
}

pub fn apply_cosine_modes_with(
    t: &DenseTensor,
    modes: &[usize],
    which: CosineMatrix,
    path: TransformPath,
) -> Result<DenseTensor> {
    let modes = sorted_modes(modes, t.order())?;
    let mut bases: HashMap<usize, DctBasis> = HashMap::new();
    let mut out = t.clone();
    for k in modes {
        let n = t.shape()[k - 1];
        let dense = match path {
            TransformPath::Dense => true,
            TransformPath::Fast => false,
            TransformPath::Auto => n <= DENSE_COSINE_MAX,
        };
        if dense {
            if let Entry::Vacant(slot) = bases.entry(n) {
                slot.insert(dct_basis(n)?);
            }
            out = mode_n_product(bases[&n].matrix(which), &out, k)?;
        } else {
            let fast = FastCosine::new(n);
            let shape = out.shape().to_vec();
            map_fibers(out.data_mut(), &shape, k - 1, |fiber, scratch| {
                fast.apply(which, fiber, scratch)
            });
        }
    }
    Ok(out)
}

/// DCT-II/III based evaluation of `C̄`, `C` and `C⁻¹` for one length.
struct FastCosine {
    n: usize,
    plan: Arc<dyn TransformType2And3<f64>>,
    // cos(iπ / 2n): the scaling that turns the unnormalized DCT-II into C
    cosq: Vec<f64>,
}

impl FastCosine {
    fn new(n: usize) -> Self {
        let plan = DctPlanner::new().plan_dct2(n);
        let nf = n as f64;
        let cosq = (0..n).map(|i| (i as f64 * PI / (2.0 * nf)).cos()).collect();
        Self { n, plan, cosq }
    }

    fn apply(&self, which: CosineMatrix, x: &mut [f64], scratch: &mut Vec<f64>) {
        let need = self.plan.get_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, 0.0);
        }
        let nf = self.n as f64;
        match which {
            CosineMatrix::Cbar => {
                self.plan.process_dct2_with_scratch(x, scratch);
                let w0 = (1.0 / nf).sqrt();
                let w = (2.0 / nf).sqrt();
                x[0] *= w0;
                x[1..].iter_mut().for_each(|v| *v *= w);
            }
            CosineMatrix::C => {
                self.plan.process_dct2_with_scratch(x, scratch);
                x.iter_mut().zip(&self.cosq).for_each(|(v, q)| *v /= q);
            }
            CosineMatrix::Cinv => {
                let s = 2.0 / nf;
                x.iter_mut().zip(&self.cosq).for_each(|(v, q)| *v *= s * q);
                self.plan.process_dct3_with_scratch(x, scratch);
            }
        }
    }
}

/// DFT along each listed mode. The inverse carries the `1/n` factor, so a forward
/// transform followed by an inverse is the identity.
pub fn apply_fourier_modes(
    t: &DenseTensor,
    modes: &[usize],
    inverse: bool,
) -> Result<ComplexTensor> {
    apply_fourier_modes_complex(&ComplexTensor::from_real(t), modes, inverse)
}

pub fn apply_fourier_modes_complex(
    t: &ComplexTensor,
    modes: &[usize],
    inverse: bool,
) -> Result<ComplexTensor> {
    let modes = sorted_modes(modes, t.shape().len())?;
    let mut out = t.clone();
    let shape = t.shape().to_vec();
    let mut planner = FftPlanner::<f64>::new();
    for k in modes {
        let n = shape[k - 1];
        let plan: Arc<dyn Fft<f64>> = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let scale = 1.0 / n as f64;
        map_fibers(out.data_mut(), &shape, k - 1, |fiber, scratch| {
            let need = plan.get_inplace_scratch_len();
            if scratch.len() < need {
                scratch.resize(need, Complex64::default());
            }
            plan.process_with_scratch(fiber, &mut scratch[..need]);
            if inverse {
                fiber.iter_mut().for_each(|z| *z *= scale);
            }
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_mat_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        let d = (a - b).abs().max();
        assert!(d < tol, "max diff {d}\n{a}\n{b}");
    }

    #[test]
    fn basis_n1() {
        let b = dct_basis(1).unwrap();
        assert_eq!(b.cbar()[(0, 0)], 1.0);
        assert_eq!(b.c1()[0], 1.0);
        assert_eq!(b.c()[(0, 0)], 1.0);
        assert!(dct_basis(0).is_err());
    }

    #[test]
    fn basis_n2() {
        let b = dct_basis(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let cbar = DMatrix::from_row_slice(2, 2, &[h, h, h, -h]);
        assert_mat_close(b.cbar(), &cbar, 1e-15);
        assert!((b.c1()[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!((b.c1()[1] - 2f64.sqrt()).abs() < 1e-14);
        assert_mat_close(b.c(), &DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]), 1e-14);
    }

    #[test]
    fn basis_n3() {
        let b = dct_basis(3).unwrap();
        let c = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 1.0, 1.0, 0.0, -1.0, 1.0, -2.0, 1.0]);
        assert_mat_close(b.c(), &c, 1e-12);
        let c1 = [3f64.sqrt(), 2f64.sqrt(), 6f64.sqrt()];
        for i in 0..3 {
            assert!((b.c1()[i] - c1[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_invariants() {
        for n in [1, 2, 3, 5, 8, 17, 32, 64] {
            let b = dct_basis(n).unwrap();
            let id = DMatrix::<f64>::identity(n, n);
            assert_mat_close(&(b.cbar() * b.cbar().transpose()), &id, 1e-12);
            assert_mat_close(&(b.c() * b.cinv()), &id, 1e-12);
            assert_mat_close(&(b.cinv() * b.c()), &id, 1e-12);
            for j in 0..n {
                assert!((b.c()[(0, j)] - 1.0).abs() < 1e-12);
                // first column of C is all ones as well
                assert!((b.c()[(j, 0)] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gamma() {
        let g = GammaOperator::new(3).unwrap();
        assert_eq!(g.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![3.0, 5.0, 3.0]);
        let inv = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 1.0, 0.0, 1.0, -1.0, 0.0, 0.0, 1.0]);
        for j in 0..3 {
            let mut e = vec![0.0; 3];
            e[j] = 1.0;
            let col = g.solve(&e).unwrap();
            for i in 0..3 {
                assert_eq!(col[i], inv[(i, j)]);
            }
        }
        let v = [0.3, -1.7, 2.2, 5.0, -0.1];
        let g5 = GammaOperator::new(5).unwrap();
        let back = g5.solve(&g5.apply(&v).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(g5.apply(&[1.0]).is_err());
        assert!(GammaOperator::new(0).is_err());
    }

    fn sample(shape: &[usize]) -> DenseTensor {
        DenseTensor::from_fn(shape, |i| {
            let s: usize = i.iter().enumerate().map(|(k, v)| (k + 3) * v * v).sum();
            ((s % 17) as f64 - 8.0) / 3.0
        })
        .unwrap()
    }

    #[test]
    fn cosine_inverse_pair_and_fiber_spot_check() {
        let t = sample(&[3, 5, 4]);
        let fwd = apply_cosine_modes(&t, &[2], CosineMatrix::C).unwrap();
        let back = apply_cosine_modes(&fwd, &[2], CosineMatrix::Cinv).unwrap();
        assert!(back.max_abs_diff(&t).unwrap() < 1e-10);

        let b = dct_basis(5).unwrap();
        let fiber = DVector::from_fn(5, |i, _| t.get(&[2, i + 1, 3]).unwrap());
        let expect = b.c() * fiber;
        for i in 0..5 {
            assert!((fwd.get(&[2, i + 1, 3]).unwrap() - expect[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_fiber_is_dc_only() {
        let t = DenseTensor::from_fn(&[2, 6, 3], |i| (i[0] * 3 + i[2]) as f64).unwrap();
        let f = apply_cosine_modes(&t, &[2], CosineMatrix::Cbar).unwrap();
        for i1 in 1..=2 {
            for i3 in 1..=3 {
                for i2 in 2..=6 {
                    assert!(f.get(&[i1, i2, i3]).unwrap().abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dense_and_fast_paths_agree() {
        for n in [1, 2, 3, 7, 16, 65, 100, 129] {
            let t = sample(&[2, n, 3]);
            for which in [CosineMatrix::Cbar, CosineMatrix::C, CosineMatrix::Cinv] {
                let d = apply_cosine_modes_with(&t, &[2], which, TransformPath::Dense).unwrap();
                let f = apply_cosine_modes_with(&t, &[2], which, TransformPath::Fast).unwrap();
                let scale = d.max_abs().max(1.0);
                assert!(
                    d.max_abs_diff(&f).unwrap() < 1e-10 * scale,
                    "n={n} {which:?}: {}",
                    d.max_abs_diff(&f).unwrap()
                );
            }
        }
    }

    #[test]
    fn cosine_mode_errors() {
        let t = sample(&[2, 3]);
        assert!(apply_cosine_modes(&t, &[3], CosineMatrix::C).is_err());
        assert!(apply_cosine_modes(&t, &[0], CosineMatrix::C).is_err());
    }

    #[test]
    fn fourier_roundtrip_delta_and_three_point() {
        let t = sample(&[2, 5, 3, 4]);
        let f = apply_fourier_modes(&t, &[2, 3], false).unwrap();
        let b = apply_fourier_modes_complex(&f, &[2, 3], true).unwrap();
        assert!(b.max_abs_imag() < 1e-10);
        assert!(b.real_part().max_abs_diff(&t).unwrap() < 1e-10);

        let mut delta = DenseTensor::zeros(&[1, 4, 1]).unwrap();
        delta.set(&[1, 1, 1], 1.0).unwrap();
        let fd = apply_fourier_modes(&delta, &[2], false).unwrap();
        for z in fd.data() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }

        let v = DenseTensor::new(vec![1, 3, 1], vec![1.0, 2.0, 3.0]).unwrap();
        let fv = apply_fourier_modes(&v, &[2], false).unwrap();
        let h = 3f64.sqrt() / 2.0;
        let expect = [
            Complex64::new(6.0, 0.0),
            Complex64::new(-1.5, h),
            Complex64::new(-1.5, -h),
        ];
        for (z, e) in fv.data().iter().zip(&expect) {
            assert!((z - e).norm() < 1e-12, "{z} vs {e}");
        }
        assert!(apply_fourier_modes(&v, &[4], false).is_err());
    }

    #[test]
    fn gamma_modes_roundtrip() {
        let t = sample(&[2, 4, 3, 2]);
        let g = apply_gamma_modes(&t, &[2, 3], false).unwrap();
        let back = apply_gamma_modes(&g, &[2, 3], true).unwrap();
        assert!(back.max_abs_diff(&t).unwrap() < 1e-12);
    }
}
