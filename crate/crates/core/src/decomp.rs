//! t-SVD and ⋆c-SVD for tensors of any order ≥ 2, with truncation and double filtering.
//!
//! Every middle slice of the transformed tensor gets its own matrix SVD. Singular
//! values are sorted in decreasing order, with ties kept in the order the matrix
//! routine produced them. Each left singular vector is normalized so its
//! largest-magnitude entry is real and positive, and the right vector gets the same
//! phase. For the DFT, slices at conjugate frequencies `ī` and `-ī mod n` are
//! computed once and conjugated, which keeps the spatial factors real.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, shape_err, Result};
use crate::products::{cosine_spectrum, fourier_spectrum, ProductKind, Spectrum};
use crate::tensor::DenseTensor;

/// Where a factor's values live.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Spatial,
    Transform,
}

/// One decomposition factor, either as a spatial tensor or as its spectrum.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Spatial(DenseTensor),
    Transform(Spectrum),
}

impl Factor {
    pub fn domain(&self) -> Domain {
        match self {
            Factor::Spatial(_) => Domain::Spatial,
            Factor::Transform(_) => Domain::Transform,
        }
    }

    pub fn to_spatial(&self) -> Result<DenseTensor> {
        match self {
            Factor::Spatial(t) => Ok(t.clone()),
            Factor::Transform(s) => s.inverse(),
        }
    }

    pub fn to_spectrum(&self, kind: ProductKind) -> Result<Spectrum> {
        match self {
            Factor::Spatial(t) => Spectrum::forward(kind, t),
            Factor::Transform(s) => Ok(s.clone()),
        }
    }

    /// Shape of the spatial tensor this factor represents.
    pub fn shape(&self) -> Vec<usize> {
        match self {
            Factor::Spatial(t) => t.shape().to_vec(),
            Factor::Transform(s) => s.shape(),
        }
    }
}

/// Factors `U`, `S`, `V` with `A ≈ U ⋆ S ⋆ Vᵀ`.
///
/// `U` is `I1 x ... x r`, `S` is `r x ... x r` and `V` is `I_N x ... x r`, where the
/// dots are the middle modes of the source tensor and `r` is the kept rank.
#[derive(Clone, Debug, PartialEq)]
pub struct TcFactors {
    kind: ProductKind,
    u: Factor,
    s: Factor,
    v: Factor,
    trunc_k: Option<usize>,
    trunc_l: Option<usize>,
    shape: Vec<usize>,
}

impl TcFactors {
    /// Assembles factors. Domains may differ here; [`TcFactors::reconstruct`] rejects that.
    pub fn new(
        kind: ProductKind,
        u: Factor,
        s: Factor,
        v: Factor,
        shape: Vec<usize>,
    ) -> Result<Self> {
        for f in [&u, &s, &v] {
            if let Factor::Transform(sp) = f {
                if sp.kind() != kind {
                    return invalid("factor spectrum belongs to a different product");
                }
            }
        }
        let (us, ss, vs) = (u.shape(), s.shape(), v.shape());
        let order = shape.len();
        if order < 2 {
            return shape_err("factors need a source tensor of order ≥ 2");
        }
        let ok = us.len() == order
            && ss.len() == order
            && vs.len() == order
            && us[0] == shape[0]
            && vs[0] == shape[order - 1]
            && us[order - 1] == ss[0]
            && ss[order - 1] == vs[order - 1]
            && us[1..order - 1] == shape[1..order - 1]
            && ss[1..order - 1] == shape[1..order - 1]
            && vs[1..order - 1] == shape[1..order - 1];
        if !ok {
            return shape_err(format!(
                "factor shapes {us:?}, {ss:?}, {vs:?} do not fit a tensor of shape {shape:?}"
            ));
        }
        Ok(Self {
            kind,
            u,
            s,
            v,
            trunc_k: None,
            trunc_l: None,
            shape,
        })
    }

    pub fn kind(&self) -> ProductKind {
        self.kind
    }

    pub fn u(&self) -> &Factor {
        &self.u
    }

    pub fn s(&self) -> &Factor {
        &self.s
    }

    pub fn v(&self) -> &Factor {
        &self.v
    }

    pub fn trunc_k(&self) -> Option<usize> {
        self.trunc_k
    }

    pub fn trunc_l(&self) -> Option<usize> {
        self.trunc_l
    }

    /// Shape of the decomposed tensor.
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Number of kept singular triplets per slice.
    pub fn rank(&self) -> usize {
        let s = self.s.shape();
        s[0]
    }

    /// The common domain of all three factors, or an error if they disagree.
    pub fn domain(&self) -> Result<Domain> {
        let d = self.u.domain();
        if self.s.domain() != d || self.v.domain() != d {
            return invalid("factors are stored in different domains");
        }
        Ok(d)
    }

    pub fn to_spatial(&self) -> Result<Self> {
        Ok(Self {
            u: Factor::Spatial(self.u.to_spatial()?),
            s: Factor::Spatial(self.s.to_spatial()?),
            v: Factor::Spatial(self.v.to_spatial()?),
            shape: self.shape.clone(),
            ..*self
        })
    }

    pub fn to_transform(&self) -> Result<Self> {
        Ok(Self {
            u: Factor::Transform(self.u.to_spectrum(self.kind)?),
            s: Factor::Transform(self.s.to_spectrum(self.kind)?),
            v: Factor::Transform(self.v.to_spectrum(self.kind)?),
            shape: self.shape.clone(),
            ..*self
        })
    }

    fn spectra(&self) -> Result<(Spectrum, Spectrum, Spectrum)> {
        Ok((
            self.u.to_spectrum(self.kind)?,
            self.s.to_spectrum(self.kind)?,
            self.v.to_spectrum(self.kind)?,
        ))
    }

    /// Transform-domain slices of `U · S · Vᴴ`.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let (u, s, v) = self.spectra()?;
        u.mul(&s)?.mul(&v.adjoint())
    }

    /// `U ⋆ S ⋆ Vᵀ`. Transform-domain factors are multiplied slice-wise and
    /// transformed back once; spatial factors go through the fast product.
    pub fn reconstruct(&self) -> Result<DenseTensor> {
        match self.domain()? {
            Domain::Transform => self.spectrum()?.inverse(),
            Domain::Spatial => {
                let (Factor::Spatial(u), Factor::Spatial(s), Factor::Spatial(v)) =
                    (&self.u, &self.s, &self.v)
                else {
                    unreachable!("domain checked above")
                };
                let us = self.kind.product(u, s)?;
                self.kind.product(&us, &self.kind.transpose(v)?)
            }
        }
    }

    /// Diagonal of every transform-domain `S` slice, in flat middle-index order.
    pub fn singular_values(&self) -> Result<Vec<Vec<f64>>> {
        let s = self.s.to_spectrum(self.kind)?;
        Ok(match &s {
            Spectrum::Cosine(st) => st.slices().iter().map(diag_re).collect(),
            Spectrum::Fourier(st) => st.slices().iter().map(diag_re).collect(),
        })
    }
}

fn diag_re<T: ComplexField<RealField = f64> + Copy>(m: &DMatrix<T>) -> Vec<f64> {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].real()).collect()
}

struct SliceSvd<T: ComplexField> {
    u: DMatrix<T>,
    s: Vec<f64>,
    v: DMatrix<T>,
}

/// Thin SVD `m = u · diag(s) · vᴴ`, sorted and sign-normalized.
fn slice_svd<T: ComplexField<RealField = f64> + Copy>(m: &DMatrix<T>) -> SliceSvd<T> {
    let (u0, s0, v0) = crate::linalg::jacobi_svd(m);
    let p = s0.len();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| s0[b].total_cmp(&s0[a]));

    let mut u = DMatrix::<T>::zeros(m.nrows(), p);
    let mut v = DMatrix::<T>::zeros(m.ncols(), p);
    let mut s = Vec::with_capacity(p);
    for (j, &src) in order.iter().enumerate() {
        u.set_column(j, &u0.column(src));
        v.set_column(j, &v0.column(src));
        s.push(s0[src]);
        let mut best = 0;
        let mut best_mod = -1.0;
        for (i, x) in u.column(j).iter().enumerate() {
            let md = x.modulus();
            if md > best_mod {
                best_mod = md;
                best = i;
            }
        }
        if best_mod > 0.0 {
            let phase = u[(best, j)].unscale(best_mod).conjugate();
            u.column_mut(j).iter_mut().for_each(|x| *x *= phase);
            v.column_mut(j).iter_mut().for_each(|x| *x *= phase);
        }
    }
    SliceSvd { u, s, v }
}

fn diag_matrix<T: ComplexField<RealField = f64>>(s: &[f64]) -> DMatrix<T> {
    let p = s.len();
    DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            T::from_real(s[i])
        } else {
            T::zero()
        }
    })
}

/// Flat index of `-ī mod n` for every flat middle index.
pub(crate) fn conjugate_partners(middle: &[usize]) -> Vec<usize> {
    let count: usize = middle.iter().product();
    (0..count)
        .map(|m| {
            let mut rem = m;
            let mut digits = vec![0; middle.len()];
            for k in (0..middle.len()).rev() {
                digits[k] = rem % middle[k];
                rem /= middle[k];
            }
            digits
                .iter()
                .zip(middle)
                .fold(0, |acc, (&d, &n)| acc * n + (n - d) % n)
        })
        .collect()
}

/// Slices whose 1-based middle indices are all ≤ `l`.
pub fn low_frequency_mask(middle: &[usize], l: usize) -> Vec<bool> {
    let count: usize = middle.iter().product();
    (0..count)
        .map(|m| {
            let mut rem = m;
            let mut keep = true;
            for &n in middle.iter().rev() {
                keep &= rem % n < l;
                rem /= n;
            }
            keep
        })
        .collect()
}

/// Slices retained by a frequency cutoff `l`. For the DFT a slice is also retained
/// when its conjugate partner passes the cutoff, so the filtered tensor stays real.
pub fn retained_slices(kind: ProductKind, middle: &[usize], l: usize) -> Vec<bool> {
    let low = low_frequency_mask(middle, l);
    match kind {
        ProductKind::Tc => low,
        ProductKind::T => conjugate_partners(middle)
            .iter()
            .enumerate()
            .map(|(m, &p)| low[m] || low[p])
            .collect(),
    }
}

/// Full decomposition with factors left in the transform domain.
pub fn svd_transform(kind: ProductKind, a: &DenseTensor) -> Result<TcFactors> {
    if a.order() < 2 {
        return shape_err("decompositions need a tensor of order ≥ 2");
    }
    let spec = Spectrum::forward(kind, a)?;
    let middle = spec.middle_shape().to_vec();
    let (u, s, v) = match &spec {
        Spectrum::Cosine(st) => {
            let parts: Vec<SliceSvd<f64>> = st.slices().par_iter().map(slice_svd).collect();
            let mut us = Vec::with_capacity(parts.len());
            let mut ss = Vec::with_capacity(parts.len());
            let mut vs = Vec::with_capacity(parts.len());
            for p in parts {
                ss.push(diag_matrix::<f64>(&p.s));
                us.push(p.u);
                vs.push(p.v);
            }
            (
                cosine_spectrum(middle.clone(), us),
                cosine_spectrum(middle.clone(), ss),
                cosine_spectrum(middle.clone(), vs),
            )
        }
        Spectrum::Fourier(st) => {
            let partners = conjugate_partners(&middle);
            let slices = st.slices();
            let reps: Vec<usize> = (0..slices.len()).filter(|&m| m <= partners[m]).collect();
            let parts: Vec<SliceSvd<Complex64>> = reps
                .par_iter()
                .map(|&m| {
                    if partners[m] == m {
                        // self-conjugate frequency: the slice is real for real input
                        let r = slices[m].map(|z| z.re);
                        let p = slice_svd(&r);
                        SliceSvd {
                            u: p.u.map(Complex64::from),
                            s: p.s,
                            v: p.v.map(Complex64::from),
                        }
                    } else {
                        slice_svd(&slices[m])
                    }
                })
                .collect();
            let n = slices.len();
            let mut us = vec![DMatrix::<Complex64>::zeros(0, 0); n];
            let mut ss = us.clone();
            let mut vs = us.clone();
            for (&m, p) in reps.iter().zip(parts) {
                let pm = partners[m];
                let sd = diag_matrix::<Complex64>(&p.s);
                if pm != m {
                    us[pm] = p.u.map(|z| z.conj());
                    vs[pm] = p.v.map(|z| z.conj());
                    ss[pm] = sd.clone();
                }
                us[m] = p.u;
                vs[m] = p.v;
                ss[m] = sd;
            }
            (
                fourier_spectrum(middle.clone(), us),
                fourier_spectrum(middle.clone(), ss),
                fourier_spectrum(middle.clone(), vs),
            )
        }
    };
    TcFactors::new(
        kind,
        Factor::Transform(u),
        Factor::Transform(s),
        Factor::Transform(v),
        a.shape().to_vec(),
    )
}

/// Decomposition `A = U ⋆ S ⋆ Vᵀ` for either product, with spatial factors.
pub fn svd(kind: ProductKind, a: &DenseTensor) -> Result<TcFactors> {
    svd_transform(kind, a)?.to_spatial()
}

/// ⋆c-SVD with spatial factors. All factors are real.
pub fn tcsvd(a: &DenseTensor) -> Result<TcFactors> {
    svd(ProductKind::Tc, a)
}

/// t-SVD with spatial factors. Conjugate-symmetric slice handling makes them real.
pub fn tsvd(a: &DenseTensor) -> Result<TcFactors> {
    svd(ProductKind::T, a)
}

fn keep_columns<T: ComplexField + Copy>(m: &DMatrix<T>, k: usize) -> DMatrix<T> {
    m.columns(0, k).into_owned()
}

fn truncate_spectrum(sp: &Spectrum, k: usize, square: bool) -> Spectrum {
    let middle = sp.middle_shape().to_vec();
    match sp {
        Spectrum::Cosine(st) => cosine_spectrum(
            middle,
            st.slices()
                .iter()
                .map(|m| {
                    if square {
                        m.view((0, 0), (k, k)).into_owned()
                    } else {
                        keep_columns(m, k)
                    }
                })
                .collect(),
        ),
        Spectrum::Fourier(st) => fourier_spectrum(
            middle,
            st.slices()
                .iter()
                .map(|m| {
                    if square {
                        m.view((0, 0), (k, k)).into_owned()
                    } else {
                        keep_columns(m, k)
                    }
                })
                .collect(),
        ),
    }
}

/// Keeps the leading `k` singular triplets of every transform-domain slice.
/// The result is in the same domain as the input.
pub fn truncate(f: &TcFactors, k: usize) -> Result<TcFactors> {
    let r = f.rank();
    if k == 0 || k > r {
        return invalid(format!("rank {k} out of range 1..={r}"));
    }
    let domain = f.domain()?;
    let (u, s, v) = f.spectra()?;
    let out = TcFactors {
        u: Factor::Transform(truncate_spectrum(&u, k, false)),
        s: Factor::Transform(truncate_spectrum(&s, k, true)),
        v: Factor::Transform(truncate_spectrum(&v, k, false)),
        trunc_k: Some(k),
        shape: f.shape.clone(),
        ..*f
    };
    match domain {
        Domain::Transform => Ok(out),
        Domain::Spatial => out.to_spatial(),
    }
}

fn zero_slices(sp: &Spectrum, keep: &[bool]) -> Spectrum {
    let middle = sp.middle_shape().to_vec();
    match sp {
        Spectrum::Cosine(st) => cosine_spectrum(
            middle,
            st.slices()
                .iter()
                .zip(keep)
                .map(|(m, &k)| if k { m.clone() } else { m.map(|_| 0.0) })
                .collect(),
        ),
        Spectrum::Fourier(st) => fourier_spectrum(
            middle,
            st.slices()
                .iter()
                .zip(keep)
                .map(|(m, &k)| if k { m.clone() } else { m.map(|_| Complex64::default()) })
                .collect(),
        ),
    }
}

/// Double filtering: drops transform slices with any middle index above `l`
/// (1-based, so `l` equal to the longest middle mode keeps everything), then keeps
/// rank `k` in the remaining slices. Factors are returned in the transform domain.
pub fn double_filter(kind: ProductKind, a: &DenseTensor, l: usize, k: usize) -> Result<TcFactors> {
    if a.order() < 2 {
        return shape_err("decompositions need a tensor of order ≥ 2");
    }
    let shape = a.shape();
    let lmax = a.middle_shape().iter().copied().max().unwrap_or(1);
    if l == 0 || l > lmax {
        return invalid(format!("frequency cutoff {l} out of range 1..={lmax}"));
    }
    let kmax = shape[0].min(shape[shape.len() - 1]);
    if k == 0 || k > kmax {
        return invalid(format!("rank {k} out of range 1..={kmax}"));
    }
    let full = svd_transform(kind, a)?;
    let keep = retained_slices(kind, a.middle_shape(), l);
    let (u, s, v) = full.spectra()?;
    let filtered = TcFactors {
        u: Factor::Transform(zero_slices(&u, &keep)),
        s: Factor::Transform(zero_slices(&s, &keep)),
        v: Factor::Transform(zero_slices(&v, &keep)),
        trunc_l: Some(l),
        shape: full.shape.clone(),
        ..full
    };
    truncate(&filtered, k)
}

/// Free-function form of [`TcFactors::reconstruct`].
pub fn reconstruct(f: &TcFactors) -> Result<DenseTensor> {
    f.reconstruct()
}
