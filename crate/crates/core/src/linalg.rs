//! One-sided Jacobi SVD for real and complex dense matrices.
//!
//! Jacobi keeps full accuracy on rank-deficient input, which the
//! per-slice decompositions hit constantly at low tubal rank.

use nalgebra::{ComplexField, DMatrix};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `m = u · diag(s) · vᴴ`, singular values in no particular order.
pub(crate) fn jacobi_svd<T>(m: &DMatrix<T>) -> (DMatrix<T>, Vec<f64>, DMatrix<T>)
where
    T: ComplexField<RealField = f64> + Copy,
{
    if m.nrows() < m.ncols() {
        let (u, s, v) = jacobi_svd(&m.adjoint());
        return (v, s, u);
    }
    let (rows, cols) = m.shape();
    let mut w = m.clone();
    let mut v = DMatrix::<T>::identity(cols, cols);
    let tol = (rows as f64).sqrt() * f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (a, b, g) = gram(&w, p, q);
                let gm = g.modulus();
                if gm == 0.0 || gm <= tol * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                // Rephase column q so the inner product becomes real.
                let phase = g.unscale(gm).conjugate();
                let zeta = (b - a) / (2.0 * gm);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let s: Vec<f64> = (0..cols).map(|j| w.column(j).norm()).collect();
    let scale = s.iter().cloned().fold(0.0, f64::max);
    let mut u = DMatrix::<T>::zeros(rows, cols);
    let mut missing = Vec::new();
    for j in 0..cols {
        if s[j] > scale * f64::EPSILON * rows as f64 && s[j] > 0.0 {
            u.set_column(j, &w.column(j).unscale(s[j]));
        } else {
            missing.push(j);
        }
    }
    complete_orthonormal(&mut u, &missing);
    (u, s, v)
}

/// Squared norms of columns `p` and `q` and their inner product, in one pass.
fn gram<T>(x: &DMatrix<T>, p: usize, q: usize) -> (f64, f64, T)
where
    T: ComplexField<RealField = f64> + Copy,
{
    let rows = x.nrows();
    let data = x.as_slice();
    let (cp, cq) = (&data[p * rows..(p + 1) * rows], &data[q * rows..(q + 1) * rows]);
    let (mut a, mut b, mut g) = (0.0, 0.0, T::zero());
    for (&u, &v) in cp.iter().zip(cq) {
        a += u.modulus_squared();
        b += v.modulus_squared();
        g += u.conjugate() * v;
    }
    (a, b, g)
}

fn rotate<T>(x: &mut DMatrix<T>, p: usize, q: usize, phase: T, c: f64, s: f64)
where
    T: ComplexField<RealField = f64> + Copy,
{
    // column-major storage: split so both columns can be borrowed mutably
    let rows = x.nrows();
    let (head, tail) = x.as_mut_slice().split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *a;
        let xq = *b * phase;
        *a = xp.scale(c) - xq.scale(s);
        *b = xp.scale(s) + xq.scale(c);
    }
}

/// Fill the listed columns with unit vectors orthogonal to every other column.
fn complete_orthonormal<T>(u: &mut DMatrix<T>, missing: &[usize])
where
    T: ComplexField<RealField = f64> + Copy,
{
    if missing.is_empty() {
        return;
    }
    let rows = u.nrows();
    let mut filled: Vec<usize> = (0..u.ncols()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0;
    for &j in missing {
        u.column_mut(j).fill(T::zero());
        while candidate < rows {
            let mut e = nalgebra::DVector::<T>::zeros(rows);
            e[candidate] = T::one();
            candidate += 1;
            for _ in 0..2 {
                for &k in &filled {
                    let proj = u.column(k).dotc(&e);
                    e -= u.column(k) * proj;
                }
            }
            let n = e.norm();
            if n > 0.5 {
                u.set_column(j, &e.unscale(n));
                filled.push(j);
                break;
            }
        }
    }
}
