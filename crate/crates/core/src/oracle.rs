//! Brute-force structured operators and reference products.
//!
//! Everything here materializes the convolution operators explicitly (circulant and
//! Toeplitz-plus-Hankel matrices, their block-tensor generalizations) and evaluates
//! products by plain contraction. It is slow by construction and exists to check the
//! transform-based fast paths.

use nalgebra::DMatrix;

use crate::error::{invalid, shape_err, Result};
use crate::tensor::{check_conformable, contract, next_index, DenseTensor};
use crate::transforms::apply_gamma_modes;

/// Refuse to materialize structured tensors beyond this many elements.
pub const MAX_ORACLE_ELEMENTS: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructuredKind {
    Circulant,
    ToeplitzHankel,
    Toeplitz,
    Hankel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredMatrix {
    pub kind: StructuredKind,
    pub n: usize,
    pub dense: DMatrix<f64>,
}

/// `Th(a)` together with its Toeplitz and Hankel parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ThSplit {
    pub toeplitz: StructuredMatrix,
    pub hankel: StructuredMatrix,
    pub th: StructuredMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructuredTensorKind {
    Tcirc,
    TH,
}

/// Block operator of order `2(N-1)` with modes `[I1, I2..I_{N-1}, J, I2..I_{N-1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredTensor {
    pub kind: StructuredTensorKind,
    pub dense: DenseTensor,
}

/// 1-based circulant source index: `i - j + 1` when `i >= j`, else `n + 1 + i - j`.
fn circ_index(i: usize, j: usize, n: usize) -> usize {
    if i >= j {
        i - j + 1
    } else {
        n + 1 + i - j
    }
}

/// Reflected Hankel index for 1-based `(i, j)`; `None` on the anti-diagonal `i + j = n + 1`.
fn hankel_index(i: usize, j: usize, n: usize) -> Option<usize> {
    let s = i + j;
    if s == n + 1 {
        None
    } else if s <= n {
        Some(s)
    } else {
        Some(2 * (n + 1) - s)
    }
}

/// `circ(a)[i, j] = a_k` with the periodic index rule.
pub fn build_circ(a: &[f64]) -> Result<StructuredMatrix> {
    let n = a.len();
    if n == 0 {
        return invalid("circ needs a non-empty vector");
    }
    let dense = DMatrix::from_fn(n, n, |i, j| a[circ_index(i + 1, j + 1, n) - 1]);
    Ok(StructuredMatrix {
        kind: StructuredKind::Circulant,
        n,
        dense,
    })
}

/// `Th(a) = Toep(a) + Hank(a)`, the reflective-boundary convolution matrix.
pub fn build_th(a: &[f64]) -> Result<ThSplit> {
    let n = a.len();
    if n == 0 {
        return invalid("Th needs a non-empty vector");
    }
    let toep = DMatrix::from_fn(n, n, |i, j| a[i.abs_diff(j)]);
    let hank = DMatrix::from_fn(n, n, |i, j| match hankel_index(i + 1, j + 1, n) {
        Some(h) => a[h - 1],
        None => 0.0,
    });
    let th = &toep + &hank;
    let wrap = |kind, dense| StructuredMatrix { kind, n, dense };
    Ok(ThSplit {
        toeplitz: wrap(StructuredKind::Toeplitz, toep),
        hankel: wrap(StructuredKind::Hankel, hank),
        th: wrap(StructuredKind::ToeplitzHankel, th),
    })
}

fn operator_shape(a: &DenseTensor, what: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    if a.order() < 3 {
        return shape_err(format!("{what} needs an order ≥ 3 tensor"));
    }
    let mid = a.middle_shape().to_vec();
    let mut shape = vec![a.shape()[0]];
    shape.extend_from_slice(&mid);
    shape.push(a.shape()[a.order() - 1]);
    shape.extend_from_slice(&mid);
    let total: usize = shape.iter().product();
    if total > MAX_ORACLE_ELEMENTS {
        return invalid(format!(
            "{what} would have {total} elements (limit {MAX_ORACLE_ELEMENTS})"
        ));
    }
    Ok((shape, mid))
}

/// Block-circulant operator: `Tcirc(A)[:, ī, :, j̄] = A[:, k̄, :]` with the circulant
/// rule applied per middle mode.
pub fn build_tcirc(a: &DenseTensor) -> Result<StructuredTensor> {
    let (shape, mid) = operator_shape(a, "Tcirc")?;
    let m = mid.len();
    let mut src = vec![0; a.order()];
    let dense = DenseTensor::from_fn(&shape, |idx| {
        src[0] = idx[0];
        src[m + 1] = idx[m + 1];
        for k in 0..m {
            src[k + 1] = circ_index(idx[k + 1], idx[m + 2 + k], mid[k]);
        }
        a.get(&src).expect("index in range")
    })?;
    Ok(StructuredTensor {
        kind: StructuredTensorKind::Tcirc,
        dense,
    })
}

/// Block Toeplitz-plus-Hankel operator built from the preconditioned kernel `Â`.
///
/// Each middle mode contributes a Toeplitz term `|i - j| + 1` and a reflected Hankel
/// term (dropped on the anti-diagonal); the operator is the sum over every
/// Toeplitz/Hankel choice across the middle modes. For one middle mode this is
/// `TH(Â)[i1, :, i3, :] = Th(Â[i1, :, i3])`.
pub fn build_th_tensor(ahat: &DenseTensor) -> Result<StructuredTensor> {
    let (shape, mid) = operator_shape(ahat, "TH")?;
    let m = mid.len();
    let mut src = vec![0; ahat.order()];
    let mut terms: Vec<Vec<usize>> = vec![Vec::with_capacity(2); m];
    let dense = DenseTensor::from_fn(&shape, |idx| {
        for k in 0..m {
            let (i, j) = (idx[k + 1], idx[m + 2 + k]);
            terms[k].clear();
            terms[k].push(i.abs_diff(j) + 1);
            if let Some(h) = hankel_index(i, j, mid[k]) {
                terms[k].push(h);
            }
        }
        src[0] = idx[0];
        src[m + 1] = idx[m + 1];
        let mut pick = vec![0usize; m];
        let mut acc = 0.0;
        loop {
            for k in 0..m {
                src[k + 1] = terms[k][pick[k]];
            }
            acc += ahat.get(&src).expect("index in range");
            let mut k = m;
            loop {
                if k == 0 {
                    return acc;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < terms[k].len() {
                    break;
                }
                pick[k] = 0;
            }
        }
    })?;
    Ok(StructuredTensor {
        kind: StructuredTensorKind::TH,
        dense,
    })
}

/// Checks the `{l, k}`-circulant condition: entries depend on `(i_l, i_k)` only
/// through `i_l - i_k mod n`.
pub fn is_circulant_pair(t: &DenseTensor, l: usize, k: usize, tol: f64) -> bool {
    let shape = t.shape();
    if l == 0 || k == 0 || l > shape.len() || k > shape.len() || shape[l - 1] != shape[k - 1] {
        return false;
    }
    let n = shape[l - 1];
    let mut idx0 = vec![0; shape.len()];
    loop {
        let idx: Vec<usize> = idx0.iter().map(|i| i + 1).collect();
        let mut shifted = idx.clone();
        shifted[l - 1] = idx[l - 1] % n + 1;
        shifted[k - 1] = idx[k - 1] % n + 1;
        let a = t.get(&idx).expect("in range");
        let b = t.get(&shifted).expect("in range");
        if (a - b).abs() > tol {
            return false;
        }
        if !next_index(&mut idx0, shape) {
            return true;
        }
    }
}

fn contract_operator(op: &DenseTensor, x: &DenseTensor) -> Result<DenseTensor> {
    let n = x.order();
    let op_modes: Vec<usize> = (n..=2 * n - 2).collect();
    let x_modes: Vec<usize> = (1..n).collect();
    contract(op, x, &op_modes, &x_modes)
}

/// Periodic-boundary product by explicit contraction with `Tcirc(A)`.
pub fn oracle_tproduct(a: &DenseTensor, x: &DenseTensor) -> Result<DenseTensor> {
    check_conformable(a, x, "oracle t-product")?;
    if a.order() == 2 {
        return contract(a, x, &[2], &[1]);
    }
    contract_operator(&build_tcirc(a)?.dense, x)
}

/// Reflective-boundary product by explicit contraction with `TH(Â)`, where
/// `Â` is `A` with `Γ⁻¹` applied along every middle mode.
pub fn oracle_tcproduct(a: &DenseTensor, x: &DenseTensor) -> Result<DenseTensor> {
    check_conformable(a, x, "oracle ⋆c-product")?;
    if a.order() == 2 {
        return contract(a, x, &[2], &[1]);
    }
    let middle: Vec<usize> = (2..a.order()).collect();
    let ahat = apply_gamma_modes(a, &middle, true)?;
    contract_operator(&build_th_tensor(&ahat)?.dense, x)
}

/// Order-3 t-product through the explicit block-circulant matrix acting on the
/// vertically stacked slices of `x`.
pub fn block_circulant_product(a: &DenseTensor, x: &DenseTensor) -> Result<DenseTensor> {
    check_conformable(a, x, "block-circulant product")?;
    if a.order() != 3 {
        return shape_err("block-circulant form is defined for order-3 tensors");
    }
    let (n1, n2, l) = (a.shape()[0], a.shape()[1], a.shape()[2]);
    let m = x.shape()[2];
    let blocks: Vec<DMatrix<f64>> = (0..n2).map(|i| a_slice(a, i)).collect();
    let mut big = DMatrix::zeros(n1 * n2, l * n2);
    for bi in 0..n2 {
        for bj in 0..n2 {
            let k = circ_index(bi + 1, bj + 1, n2) - 1;
            big.view_mut((bi * n1, bj * l), (n1, l)).copy_from(&blocks[k]);
        }
    }
    let mut stacked = DMatrix::zeros(l * n2, m);
    for j in 0..n2 {
        stacked.view_mut((j * l, 0), (l, m)).copy_from(&a_slice(x, j));
    }
    let y = big * stacked;
    DenseTensor::from_fn(&[n1, n2, m], |idx| {
        y[((idx[1] - 1) * n1 + idx[0] - 1, idx[2] - 1)]
    })
}

fn a_slice(t: &DenseTensor, i: usize) -> DMatrix<f64> {
    let s = t.shape();
    DMatrix::from_fn(s[0], s[2], |r, c| t.get(&[r + 1, i + 1, c + 1]).expect("in range"))
}
