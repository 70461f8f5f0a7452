//! Compression by double filtering, with factor storage in either domain.
//!
//! `S` is folded into `U`, so an archive holds `U·S` and `V` only.
//!
//! * SFD (frequency domain): the transform-domain slices whose middle indices are
//!   all ≤ `l`, each `I1 x k` for `U·S` and `I_N x k` for `V`. Complex slices store
//!   real and imaginary parts. For the DFT, slices at conjugate frequencies are
//!   rebuilt on load, so an order-3 archive holds `(I1 + I3)·l·k` reals for ⋆c and
//!   twice that for ⋆t.
//! * SMD (main domain): the spatial tensors `U·S` (`I1 x ... x k`) and
//!   `V` (`I_N x ... x k`), all real, `(I1 + I_N)·I2···I_{N-1}·k` values.
//!
//! Archive bytes: magic `TCSF`, version byte, kind byte (0 = t, 1 = ⋆c), layout
//! byte (0 = SFD, 1 = SMD), order byte, mode lengths as u64 LE, `l` and `k` as
//! u32 LE, then the payload as f64 LE (`U·S` slices first, then `V`, each slice
//! row-major, slices in canonical middle-index order).

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::decomp::{conjugate_partners, double_filter, low_frequency_mask};
use crate::error::{invalid, Error, Result};
use crate::io::{read_dims, Reader};
use crate::products::{cosine_spectrum, fourier_spectrum, ProductKind, Spectrum};
use crate::tensor::{DenseTensor, SliceStack};

pub const MAGIC: &[u8; 4] = b"TCSF";
pub const VERSION: u8 = 1;
/// Upper bound on the archive header size.
pub const MAX_HEADER_BYTES: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Storage in the frequency (transform) domain.
    Sfd,
    /// Storage in the main (spatial) domain.
    Smd,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Sfd => "sfd",
            Layout::Smd => "smd",
        })
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sfd" => Ok(Layout::Sfd),
            "smd" => Ok(Layout::Smd),
            _ => invalid(format!("unknown layout '{s}' (expected sfd or smd)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompressedArchive {
    kind: ProductKind,
    layout: Layout,
    l: usize,
    k: usize,
    shape: Vec<usize>,
    payload: Vec<f64>,
}

/// Header length for an order-`n` tensor.
pub fn header_bytes(order: usize) -> usize {
    4 + 4 + 8 * order + 8
}

/// Number of transform slices an SFD archive stores.
pub fn stored_slice_count(middle: &[usize], l: usize) -> usize {
    middle.iter().map(|&n| n.min(l)).product()
}

/// Payload value count predicted by the storage model.
pub fn payload_values(kind: ProductKind, layout: Layout, shape: &[usize], l: usize, k: usize) -> usize {
    let order = shape.len();
    let outer = shape[0] + shape[order - 1];
    let middle = &shape[1..order - 1];
    match layout {
        Layout::Sfd => {
            let reals = outer * stored_slice_count(middle, l) * k;
            match kind {
                ProductKind::Tc => reals,
                ProductKind::T => 2 * reals,
            }
        }
        Layout::Smd => outer * middle.iter().product::<usize>() * k,
    }
}

fn push_slice<T: ComplexField<RealField = f64> + Copy>(
    out: &mut Vec<f64>,
    m: &DMatrix<T>,
    complex: bool,
) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push(z.real());
            if complex {
                out.push(z.imaginary());
            }
        }
    }
}

fn spatial_rows(t: &DenseTensor, out: &mut Vec<f64>) {
    // slice-major, matching the SFD ordering
    let mid = t.middle_count();
    for m in 0..mid {
        push_slice(out, &t.slice_flat(m), false);
    }
}

/// Compresses `a` with double filtering at frequency cutoff `l` and rank `k`.
pub fn compress(
    a: &DenseTensor,
    kind: ProductKind,
    layout: Layout,
    l: usize,
    k: usize,
) -> Result<CompressedArchive> {
    if header_bytes(a.order()) > MAX_HEADER_BYTES {
        return invalid(format!("order {} is too large for the archive header", a.order()));
    }
    let f = double_filter(kind, a, l, k)?;
    let v = f.v().to_spectrum(kind)?;
    let us = f.u().to_spectrum(kind)?.mul(&f.s().to_spectrum(kind)?)?;
    let mut payload = Vec::with_capacity(payload_values(kind, layout, a.shape(), l, k));
    match layout {
        Layout::Sfd => {
            let keep = low_frequency_mask(a.middle_shape(), l);
            for sp in [&us, &v] {
                match sp {
                    Spectrum::Cosine(st) => st
                        .slices()
                        .iter()
                        .zip(&keep)
                        .filter(|(_, &k)| k)
                        .for_each(|(m, _)| push_slice(&mut payload, m, false)),
                    Spectrum::Fourier(st) => st
                        .slices()
                        .iter()
                        .zip(&keep)
                        .filter(|(_, &k)| k)
                        .for_each(|(m, _)| push_slice(&mut payload, m, true)),
                }
            }
        }
        Layout::Smd => {
            spatial_rows(&us.inverse()?, &mut payload);
            spatial_rows(&v.inverse()?, &mut payload);
        }
    }
    Ok(CompressedArchive {
        kind,
        layout,
        l,
        k,
        shape: a.shape().to_vec(),
        payload,
    })
}

fn read_slices(
    vals: &mut std::slice::Iter<'_, f64>,
    count: usize,
    rows: usize,
    cols: usize,
    complex: bool,
) -> (Vec<DMatrix<f64>>, Vec<DMatrix<Complex64>>) {
    let mut real = Vec::new();
    let mut cplx = Vec::new();
    for _ in 0..count {
        if complex {
            let mut m = DMatrix::<Complex64>::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    let re = *vals.next().expect("payload size checked");
                    let im = *vals.next().expect("payload size checked");
                    m[(i, j)] = Complex64::new(re, im);
                }
            }
            cplx.push(m);
        } else {
            let mut m = DMatrix::<f64>::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m[(i, j)] = *vals.next().expect("payload size checked");
                }
            }
            real.push(m);
        }
    }
    (real, cplx)
}

/// Places stored slices at their middle positions. Unstored slices are zero, except
/// that DFT slices whose conjugate partner was stored are filled with its conjugate.
fn full_spectrum(
    kind: ProductKind,
    middle: &[usize],
    keep: &[bool],
    real: Vec<DMatrix<f64>>,
    cplx: Vec<DMatrix<Complex64>>,
    rows: usize,
    cols: usize,
) -> Spectrum {
    match kind {
        ProductKind::Tc => {
            let mut it = real.into_iter();
            let slices = keep
                .iter()
                .map(|&k| {
                    if k {
                        it.next().expect("one slice per kept index")
                    } else {
                        DMatrix::zeros(rows, cols)
                    }
                })
                .collect();
            cosine_spectrum(middle.to_vec(), slices)
        }
        ProductKind::T => {
            let mut it = cplx.into_iter();
            let mut slices: Vec<Option<DMatrix<Complex64>>> = keep
                .iter()
                .map(|&k| if k { it.next() } else { None })
                .collect();
            let partners = conjugate_partners(middle);
            for m in 0..slices.len() {
                if slices[m].is_none() {
                    if let Some(p) = &slices[partners[m]] {
                        slices[m] = Some(p.map(|z| z.conj()));
                    }
                }
            }
            let slices = slices
                .into_iter()
                .map(|s| s.unwrap_or_else(|| DMatrix::zeros(rows, cols)))
                .collect();
            fourier_spectrum(middle.to_vec(), slices)
        }
    }
}

fn spatial_from_rows(
    vals: &mut std::slice::Iter<'_, f64>,
    rows: usize,
    middle: &[usize],
    cols: usize,
) -> Result<DenseTensor> {
    let count: usize = middle.iter().product();
    let (slices, _) = read_slices(vals, count, rows, cols, false);
    Ok(SliceStack::from_parts(middle.to_vec(), slices).to_tensor())
}

/// Rebuilds the tensor from an archive.
pub fn decompress(ar: &CompressedArchive) -> Result<DenseTensor> {
    ar.validate()?;
    let order = ar.shape.len();
    let (i1, in_) = (ar.shape[0], ar.shape[order - 1]);
    let middle = &ar.shape[1..order - 1];
    let mut vals = ar.payload.iter();
    match ar.layout {
        Layout::Sfd => {
            let keep = low_frequency_mask(middle, ar.l);
            let count = keep.iter().filter(|&&k| k).count();
            let complex = ar.kind == ProductKind::T;
            let (ur, uc) = read_slices(&mut vals, count, i1, ar.k, complex);
            let (vr, vc) = read_slices(&mut vals, count, in_, ar.k, complex);
            let us = full_spectrum(ar.kind, middle, &keep, ur, uc, i1, ar.k);
            let v = full_spectrum(ar.kind, middle, &keep, vr, vc, in_, ar.k);
            us.mul(&v.adjoint())?.inverse()
        }
        Layout::Smd => {
            let us = spatial_from_rows(&mut vals, i1, middle, ar.k)?;
            let v = spatial_from_rows(&mut vals, in_, middle, ar.k)?;
            let vt = ar.kind.transpose(&v)?;
            ar.kind.product(&us, &vt)
        }
    }
}

impl CompressedArchive {
    pub fn kind(&self) -> ProductKind {
        self.kind
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn payload(&self) -> &[f64] {
        &self.payload
    }

    pub fn header_bytes(&self) -> usize {
        header_bytes(self.shape.len())
    }

    pub fn payload_bytes(&self) -> usize {
        8 * self.payload.len()
    }

    /// Total serialized size.
    pub fn byte_count(&self) -> usize {
        self.header_bytes() + self.payload_bytes()
    }

    fn validate(&self) -> Result<()> {
        let order = self.shape.len();
        if order < 2 {
            return Err(Error::Format("archive tensor order must be ≥ 2".into()));
        }
        let kmax = self.shape[0].min(self.shape[order - 1]);
        if self.k == 0 || self.k > kmax {
            return Err(Error::Format(format!("archive rank {} out of range", self.k)));
        }
        let lmax = self.shape[1..order - 1].iter().copied().max().unwrap_or(1);
        if self.l == 0 || self.l > lmax {
            return Err(Error::Format(format!("archive cutoff {} out of range", self.l)));
        }
        let want = payload_values(self.kind, self.layout, &self.shape, self.l, self.k);
        if self.payload.len() != want {
            return Err(Error::Format(format!(
                "payload holds {} values, expected {want}",
                self.payload.len()
            )));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_count());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(match self.kind {
            ProductKind::T => 0,
            ProductKind::Tc => 1,
        });
        out.push(match self.layout {
            Layout::Sfd => 0,
            Layout::Smd => 1,
        });
        out.push(self.shape.len() as u8);
        for &d in &self.shape {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        out.extend_from_slice(&(self.l as u32).to_le_bytes());
        out.extend_from_slice(&(self.k as u32).to_le_bytes());
        for x in &self.payload {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "archive");
        if r.take(4)? != MAGIC {
            return Err(Error::Format("not a compressed archive (bad magic)".into()));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported archive version {version}")));
        }
        let kind = match r.u8()? {
            0 => ProductKind::T,
            1 => ProductKind::Tc,
            b => return Err(Error::Format(format!("unknown product kind byte {b}"))),
        };
        let layout = match r.u8()? {
            0 => Layout::Sfd,
            1 => Layout::Smd,
            b => return Err(Error::Format(format!("unknown layout byte {b}"))),
        };
        let order = r.u8()? as usize;
        if order < 2 || header_bytes(order) > MAX_HEADER_BYTES {
            return Err(Error::Format(format!("unsupported archive order {order}")));
        }
        let shape = read_dims(&mut r, order)?;
        let l = r.u32_le()? as usize;
        let k = r.u32_le()? as usize;
        if !r.remaining().is_multiple_of(8) {
            return Err(Error::Format("payload is not a whole number of f64 values".into()));
        }
        let payload = r.f64s_le(r.remaining() / 8)?;
        let ar = Self {
            kind,
            layout,
            l,
            k,
            shape,
            payload,
        };
        ar.validate()?;
        Ok(ar)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

/// Peak signal-to-noise ratio in dB; `f64::INFINITY` when the tensors are identical.
pub fn psnr(reference: &DenseTensor, test: &DenseTensor, max_value: f64) -> Result<f64> {
    if reference.shape() != test.shape() {
        return Err(Error::ShapeMismatch(format!(
            "psnr operands differ: {:?} vs {:?}",
            reference.shape(),
            test.shape()
        )));
    }
    if !(max_value > 0.0 && max_value.is_finite()) {
        return invalid("psnr peak value must be positive and finite");
    }
    let mse = reference
        .data()
        .iter()
        .zip(test.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / reference.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (max_value * max_value / mse).log10())
}
