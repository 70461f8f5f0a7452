//! Feature extraction by truncated projection, k-means and normalized mutual information.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::decomp::{low_frequency_mask, svd_transform, truncate};
use crate::error::{invalid, shape_err, Result};
use crate::products::{ProductKind, Spectrum};
use crate::tensor::DenseTensor;

/// Per-sample feature rows.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    /// `samples x features`.
    pub rows: DMatrix<f64>,
    /// Rank used for the projection.
    pub k: usize,
    /// Frequency cutoff, if transform slices were dropped.
    pub l: Option<usize>,
}

/// Projects the samples (last mode) of `a` onto the first `k` left singular slices
/// and returns the transform-domain coefficients as feature rows.
///
/// With `l` set, only slices whose middle indices are all ≤ `l` contribute. DFT
/// coefficients contribute their real and imaginary parts. At full rank the
/// projection is a per-slice unitary change of basis, so pairwise distances equal
/// those between the transformed samples.
pub fn extract_features(
    kind: ProductKind,
    a: &DenseTensor,
    k: usize,
    l: Option<usize>,
) -> Result<FeatureMatrix> {
    if a.order() < 2 {
        return shape_err("feature extraction needs samples on the last mode of an order ≥ 2 tensor");
    }
    let n = a.shape()[a.order() - 1];
    let kmax = a.shape()[0].min(n);
    if k == 0 || k > kmax {
        return invalid(format!("rank {k} out of range 1..={kmax}"));
    }
    let lmax = a.middle_shape().iter().copied().max().unwrap_or(1);
    let cutoff = l.unwrap_or(lmax);
    if cutoff == 0 || cutoff > lmax {
        return invalid(format!("frequency cutoff {cutoff} out of range 1..={lmax}"));
    }
    let keep = low_frequency_mask(a.middle_shape(), cutoff);
    let f = truncate(&svd_transform(kind, a)?, k)?;
    let proj = f.u().to_spectrum(kind)?.adjoint().mul(&Spectrum::forward(kind, a)?)?;
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); n];
    match &proj {
        Spectrum::Cosine(st) => {
            for (m, _) in st.slices().iter().zip(&keep).filter(|(_, &k)| k) {
                for (j, col) in cols.iter_mut().enumerate() {
                    col.extend(m.column(j).iter());
                }
            }
        }
        Spectrum::Fourier(st) => {
            for (m, _) in st.slices().iter().zip(&keep).filter(|(_, &k)| k) {
                for (j, col) in cols.iter_mut().enumerate() {
                    for z in m.column(j).iter() {
                        col.push(z.re);
                        col.push(z.im);
                    }
                }
            }
        }
    }
    let d = cols[0].len();
    let rows = DMatrix::from_fn(n, d, |i, j| cols[i][j]);
    Ok(FeatureMatrix { rows, k, l })
}

fn sq_dist(x: &DMatrix<f64>, i: usize, c: &DMatrix<f64>, j: usize) -> f64 {
    x.row(i)
        .iter()
        .zip(c.row(j).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// k-means with 10 restarts of at most 300 Lloyd iterations each.
pub fn kmeans(x: &DMatrix<f64>, c: usize, seed: u64) -> Result<Vec<usize>> {
    kmeans_with(x, c, seed, 10, 300)
}

/// Lloyd's algorithm. Each restart starts from `c` distinct rows sampled with
/// Xoshiro256++ (`seed_from_u64(seed)`, one stream across restarts) and stops when
/// assignments no longer change. The restart with the lowest within-cluster sum of
/// squares wins (the first one on ties). An emptied cluster keeps its centroid.
pub fn kmeans_with(
    x: &DMatrix<f64>,
    c: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
) -> Result<Vec<usize>> {
    let n = x.nrows();
    if n == 0 {
        return invalid("k-means needs at least one sample");
    }
    if c == 0 || c > n {
        return invalid(format!("cluster count {c} out of range 1..={n}"));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let init = sample(&mut rng, n, c);
        let mut centers = DMatrix::from_fn(c, x.ncols(), |i, j| x[(init.index(i), j)]);
        let mut assign = vec![usize::MAX; n];
        for _ in 0..max_iter.max(1) {
            let mut changed = false;
            for i in 0..n {
                let mut b = (f64::INFINITY, 0);
                for j in 0..c {
                    let d = sq_dist(x, i, &centers, j);
                    if d < b.0 {
                        b = (d, j);
                    }
                }
                if assign[i] != b.1 {
                    assign[i] = b.1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            let mut sums = DMatrix::<f64>::zeros(c, x.ncols());
            let mut counts = vec![0usize; c];
            for i in 0..n {
                let a = assign[i];
                counts[a] += 1;
                let mut row = sums.row_mut(a);
                row += x.row(i);
            }
            for j in 0..c {
                if counts[j] > 0 {
                    let mean = sums.row(j) / counts[j] as f64;
                    centers.set_row(j, &mean);
                }
            }
        }
        let inertia: f64 = (0..n).map(|i| sq_dist(x, i, &centers, assign[i])).sum();
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, assign));
        }
    }
    Ok(best.expect("at least one restart").1)
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information `I(a; b) / √(H(a) H(b))` with natural logarithms.
///
/// Two single-cluster labelings score 1; a single-cluster labeling against any
/// other scores 0.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return shape_err(format!("labelings differ in length ({} vs {})", a.len(), b.len()));
    }
    if a.is_empty() {
        return invalid("labelings are empty");
    }
    let n = a.len() as f64;
    let mut ca: HashMap<usize, usize> = HashMap::new();
    let mut cb: HashMap<usize, usize> = HashMap::new();
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
        *joint.entry((x, y)).or_default() += 1;
    }
    let ha = entropy(ca.values().copied(), n);
    let hb = entropy(cb.values().copied(), n);
    if ca.len() == 1 && cb.len() == 1 {
        return Ok(1.0);
    }
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    let mut keys: Vec<_> = joint.iter().collect();
    keys.sort();
    let mi: f64 = keys
        .into_iter()
        .map(|(&(x, y), &c)| {
            let pxy = c as f64 / n;
            let px = ca[&x] as f64 / n;
            let py = cb[&y] as f64 / n;
            pxy * (pxy / (px * py)).ln()
        })
        .sum();
    Ok((mi / (ha * hb).sqrt()).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::sample_rows;
    use crate::io::synthetic::{blobs, gaussian};
    use crate::transforms::{apply_cosine_modes, apply_fourier_modes, CosineMatrix};

    #[test]
    fn four_points() {
        let x = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 0.0, 1.0, 10.0, 0.0, 10.0, 1.0]);
        let y = kmeans(&x, 2, 1).unwrap();
        assert_eq!(y[0], y[1]);
        assert_eq!(y[2], y[3]);
        assert_ne!(y[0], y[2]);
        assert_eq!(nmi(&y, &[0, 0, 1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn nmi_conventions() {
        let a = [0, 0, 1, 1, 2, 2];
        assert!((nmi(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(nmi(&a, &[5; 6]).unwrap(), 0.0);
        assert_eq!(nmi(&[1; 4], &[2; 4]).unwrap(), 1.0);
        let b = [1, 0, 1, 2, 2, 0];
        assert!((nmi(&a, &b).unwrap() - nmi(&b, &a).unwrap()).abs() < 1e-15);
        let renamed: Vec<usize> = a.iter().map(|v| (v + 1) % 3 + 7).collect();
        assert!((nmi(&renamed, &b).unwrap() - nmi(&a, &b).unwrap()).abs() < 1e-15);
        assert!(nmi(&a, &b[..5]).is_err());
        assert!(nmi(&[], &[]).is_err());
    }

    #[test]
    fn kmeans_errors() {
        let x = DMatrix::<f64>::zeros(3, 2);
        assert!(kmeans(&x, 0, 1).is_err());
        assert!(kmeans(&x, 4, 1).is_err());
        assert!(kmeans(&DMatrix::<f64>::zeros(0, 2), 1, 1).is_err());
    }

    #[test]
    fn identical_samples_identical_rows() {
        let one = gaussian(&[3, 4, 1], 2).unwrap();
        let data: Vec<f64> = one.data().iter().flat_map(|&v| [v; 5]).collect();
        let a = DenseTensor::new(vec![3, 4, 5], data).unwrap();
        for kind in ProductKind::ALL {
            let f = extract_features(kind, &a, 1, None).unwrap();
            for i in 1..5 {
                assert!((f.rows.row(i) - f.rows.row(0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn full_rank_preserves_transform_distances() {
        let a = gaussian(&[3, 4, 7], 4).unwrap();
        for kind in ProductKind::ALL {
            let f = extract_features(kind, &a, 3, None).unwrap();
            let raw = match kind {
                ProductKind::Tc => sample_rows(&apply_cosine_modes(&a, &[2], CosineMatrix::C).unwrap()),
                ProductKind::T => {
                    let z = apply_fourier_modes(&a, &[2], false).unwrap();
                    let im: Vec<f64> = z.data().iter().map(|c| c.im).collect();
                    let re = sample_rows(&z.real_part());
                    let im = sample_rows(&DenseTensor::new(z.shape().to_vec(), im).unwrap());
                    let d = re.ncols();
                    let mut both = DMatrix::zeros(7, 2 * d);
                    both.columns_mut(0, d).copy_from(&re);
                    both.columns_mut(d, d).copy_from(&im);
                    both
                }
            };
            for i in 0..7 {
                for j in 0..7 {
                    let df = (f.rows.row(i) - f.rows.row(j)).norm();
                    let dr = (raw.row(i) - raw.row(j)).norm();
                    assert!((df - dr).abs() < 1e-10 * (1.0 + dr), "{kind}");
                }
            }
        }
    }

    #[test]
    fn blobs_cluster_through_features() {
        let (a, y) = blobs(&[5, 4, 60], 2, 2.0, 9).unwrap();
        for kind in ProductKind::ALL {
            let f = extract_features(kind, &a, 2, Some(2)).unwrap();
            let got = kmeans(&f.rows, 2, 3).unwrap();
            assert!(nmi(&got, &y).unwrap() > 0.9, "{kind}");
        }
    }
}
