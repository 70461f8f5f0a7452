#![allow(dead_code)]

use nalgebra::DMatrix;
use tcsvd::io::synthetic::gaussian;
use tcsvd::{DenseTensor, ProductKind, Spectrum};

pub fn rand_tensor(shape: &[usize], seed: u64) -> DenseTensor {
    gaussian(shape, seed).unwrap()
}

/// Conformable pair `A: I1 x mid x J`, `X: J x mid x IN`.
pub fn conformable_pair(i1: usize, mid: &[usize], j: usize, in_: usize, seed: u64) -> (DenseTensor, DenseTensor) {
    let mut sa = vec![i1];
    sa.extend_from_slice(mid);
    sa.push(j);
    let mut sx = vec![j];
    sx.extend_from_slice(mid);
    sx.push(in_);
    (rand_tensor(&sa, seed), rand_tensor(&sx, seed.wrapping_add(1_000_003)))
}

/// Transform-domain slices as real matrices; complex slices are split into
/// `[re; im]` blocks so Frobenius norms are preserved.
pub fn real_slices(s: &Spectrum) -> Vec<DMatrix<f64>> {
    match s {
        Spectrum::Cosine(st) => st.slices().to_vec(),
        Spectrum::Fourier(st) => st
            .slices()
            .iter()
            .map(|m| {
                let (r, c) = m.shape();
                DMatrix::from_fn(2 * r, c, |i, j| if i < r { m[(i, j)].re } else { m[(i - r, j)].im })
            })
            .collect(),
    }
}

pub fn slice_diff_energy(a: &Spectrum, b: &Spectrum) -> f64 {
    real_slices(a)
        .iter()
        .zip(real_slices(b))
        .map(|(x, y)| (x - y).norm_squared())
        .sum()
}

pub const KINDS: [ProductKind; 2] = [ProductKind::T, ProductKind::Tc];
