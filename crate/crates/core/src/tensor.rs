//! Dense arbitrary-order real tensors and the multilinear primitives built on them.
//!
//! Storage is contiguous with the last index varying fastest. All public
//! indices (element positions, mode numbers, middle indices) are 1-based.

use nalgebra::{ComplexField, DMatrix, DMatrixView, Scalar};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, shape_err, Error, Result};

/// Arbitrary-order real tensor with contiguous last-index-fastest storage.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

/// Complex counterpart of [`DenseTensor`], used for Fourier-domain intermediates.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexTensor {
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

/// 1-based index `(i_2, ..., i_{N-1})` over the middle modes of an order-N tensor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MiddleIndex(Vec<usize>);

fn check_shape(shape: &[usize]) -> Result<usize> {
    if shape.is_empty() {
        return shape_err("tensor order must be at least 1");
    }
    if shape.contains(&0) {
        return shape_err(format!("mode lengths must be positive, got {shape:?}"));
    }
    Ok(shape.iter().product())
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

/// Advances a 0-based odometer; returns false once it wraps around.
pub(crate) fn next_index(idx: &mut [usize], shape: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// `(outer, len, inner)` such that the tensor is an `outer x len x inner` block array around `axis`.
pub(crate) fn split_at_axis(shape: &[usize], axis: usize) -> (usize, usize, usize) {
    let outer = shape[..axis].iter().product();
    let inner = shape[axis + 1..].iter().product();
    (outer, shape[axis], inner)
}

/// Applies `f` in place to every fiber along `axis` (0-based). Fibers are processed
/// independently, so the parallel schedule does not affect results.
pub(crate) fn map_fibers<T, F>(data: &mut [T], shape: &[usize], axis: usize, f: F)
where
    T: Copy + Send + Sync + Default,
    F: Fn(&mut [T], &mut Vec<T>) + Sync,
{
    let (_, len, inner) = split_at_axis(shape, axis);
    data.par_chunks_mut(len * inner).for_each(|block| {
        let mut scratch = Vec::new();
        if inner == 1 {
            f(block, &mut scratch);
            return;
        }
        let mut fiber = vec![T::default(); len];
        for c in 0..inner {
            for (i, v) in fiber.iter_mut().enumerate() {
                *v = block[i * inner + c];
            }
            f(&mut fiber, &mut scratch);
            for (i, v) in fiber.iter().enumerate() {
                block[i * inner + c] = *v;
            }
        }
    });
}

fn mode_check(mode: usize, order: usize) -> Result<usize> {
    if mode == 0 || mode > order {
        return Err(Error::ModeOutOfRange { mode, order });
    }
    Ok(mode - 1)
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let n = check_shape(&shape)?;
        if data.len() != n {
            return shape_err(format!(
                "data length {} does not match shape {shape:?} ({n} elements)",
                data.len()
            ));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Result<Self> {
        let n = check_shape(shape)?;
        Ok(Self {
            shape: shape.to_vec(),
            data: vec![0.0; n],
        })
    }

    /// Builds a tensor from a function of the 1-based multi-index.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let n = check_shape(shape)?;
        let mut data = Vec::with_capacity(n);
        let mut idx0 = vec![0; shape.len()];
        let mut idx1 = vec![1; shape.len()];
        loop {
            for (a, b) in idx1.iter_mut().zip(&idx0) {
                *a = b + 1;
            }
            data.push(f(&idx1));
            if !next_index(&mut idx0, shape) {
                break;
            }
        }
        Ok(Self {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let (r, c) = m.shape();
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                data.push(m[(i, j)]);
            }
        }
        Self {
            shape: vec![r, c],
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.order() != 2 {
            return shape_err(format!("expected an order-2 tensor, got shape {:?}", self.shape));
        }
        Ok(DMatrix::from_row_slice(self.shape[0], self.shape[1], &self.data))
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    fn offset(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.order() {
            return Err(Error::IndexOutOfBounds(format!(
                "index {idx:?} has {} entries for an order-{} tensor",
                idx.len(),
                self.order()
            )));
        }
        let mut off = 0;
        for (k, (&i, &n)) in idx.iter().zip(&self.shape).enumerate() {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfBounds(format!(
                    "index {i} in mode {} exceeds length {n}",
                    k + 1
                )));
            }
            off = off * n + (i - 1);
        }
        Ok(off)
    }

    /// Element at a 1-based multi-index.
    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        Ok(self.data[self.offset(idx)?])
    }

    pub fn set(&mut self, idx: &[usize], value: f64) -> Result<()> {
        let off = self.offset(idx)?;
        self.data[off] = value;
        Ok(())
    }

    pub fn reshape(self, shape: &[usize]) -> Result<Self> {
        Self::new(shape.to_vec(), self.data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.shape != other.shape {
            return shape_err(format!(
                "{what}: shapes {:?} and {:?} differ",
                self.shape, other.shape
            ));
        }
        Ok(())
    }

    /// Frobenius inner product.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_shape(other, "inner product")?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self {
            shape: self.shape.clone(),
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self {
            shape: self.shape.clone(),
            data,
        })
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| alpha * x).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other, "max_abs_diff")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `‖self − other‖_F / ‖other‖_F`, or the absolute error when `other` is zero.
    pub fn rel_error(&self, other: &Self) -> Result<f64> {
        let diff = self.sub(other)?.frobenius_norm();
        let base = other.frobenius_norm();
        Ok(if base > 0.0 { diff / base } else { diff })
    }

    /// Lengths of modes `2..N-1`; empty for order ≤ 2.
    pub fn middle_shape(&self) -> &[usize] {
        if self.order() <= 2 {
            &[]
        } else {
            &self.shape[1..self.order() - 1]
        }
    }

    /// Number of middle-mode slices (1 for order-2 tensors).
    pub fn middle_count(&self) -> usize {
        self.middle_shape().iter().product()
    }

    pub fn middle_indices(&self) -> impl Iterator<Item = MiddleIndex> + '_ {
        let shape = self.middle_shape().to_vec();
        (0..self.middle_count()).map(move |m| MiddleIndex::from_flat(m, &shape))
    }

    fn require_sliceable(&self) -> Result<()> {
        if self.order() < 2 {
            return shape_err("middle slices need an order ≥ 2 tensor");
        }
        Ok(())
    }

    /// The `I_1 x I_N` matrix with the middle modes fixed at `idx`.
    pub fn middle_slice(&self, idx: &MiddleIndex) -> Result<DMatrix<f64>> {
        self.require_sliceable()?;
        let m = idx.flat(self.middle_shape())?;
        Ok(self.slice_flat(m))
    }

    pub fn set_middle_slice(&mut self, idx: &MiddleIndex, slice: &DMatrix<f64>) -> Result<()> {
        self.require_sliceable()?;
        let m = idx.flat(self.middle_shape())?;
        let rows = self.shape[0];
        let cols = self.shape[self.order() - 1];
        if slice.shape() != (rows, cols) {
            return shape_err(format!(
                "slice is {:?}, expected ({rows}, {cols})",
                slice.shape()
            ));
        }
        let mid = self.middle_count();
        for i in 0..rows {
            let base = (i * mid + m) * cols;
            for j in 0..cols {
                self.data[base + j] = slice[(i, j)];
            }
        }
        Ok(())
    }

    pub(crate) fn slice_flat(&self, m: usize) -> DMatrix<f64> {
        let rows = self.shape[0];
        let cols = self.shape[self.order() - 1];
        let mid = self.middle_count();
        DMatrix::from_fn(rows, cols, |i, j| self.data[(i * mid + m) * cols + j])
    }

    /// Reorders modes: mode `k` of the result is mode `perm[k]` of `self` (1-based).
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.order();
        if perm.len() != n {
            return invalid(format!("permutation {perm:?} has wrong length for order {n}"));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            let p0 = mode_check(p, n)?;
            if seen[p0] {
                return invalid(format!("permutation {perm:?} repeats mode {p}"));
            }
            seen[p0] = true;
        }
        Ok(Self {
            shape: perm.iter().map(|&p| self.shape[p - 1]).collect(),
            data: permute_data(&self.data, &self.shape, perm),
        })
    }
}

fn permute_data<T: Copy>(data: &[T], shape: &[usize], perm: &[usize]) -> Vec<T> {
    let src_strides = strides(shape);
    let out_shape: Vec<usize> = perm.iter().map(|&p| shape[p - 1]).collect();
    let step: Vec<usize> = perm.iter().map(|&p| src_strides[p - 1]).collect();
    let mut out = Vec::with_capacity(data.len());
    let mut idx = vec![0; shape.len()];
    let mut off = 0usize;
    loop {
        out.push(data[off]);
        // odometer with incremental source offset
        let mut k = idx.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            off += step[k];
            if idx[k] < out_shape[k] {
                break;
            }
            off -= step[k] * out_shape[k];
            idx[k] = 0;
        }
    }
}

impl ComplexTensor {
    pub fn new(shape: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        let n = check_shape(&shape)?;
        if data.len() != n {
            return shape_err(format!(
                "data length {} does not match shape {shape:?}",
                data.len()
            ));
        }
        Ok(Self { shape, data })
    }

    pub fn from_real(t: &DenseTensor) -> Self {
        Self {
            shape: t.shape.clone(),
            data: t.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, idx: &[usize]) -> Result<Complex64> {
        let probe = DenseTensor {
            shape: self.shape.clone(),
            data: Vec::new(),
        };
        Ok(self.data[probe.offset(idx)?])
    }

    pub fn real_part(&self) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|z| z.re).collect(),
        }
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn imag_norm(&self) -> f64 {
        self.data.iter().map(|z| z.im * z.im).sum::<f64>().sqrt()
    }
}

impl MiddleIndex {
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    /// The single (empty) middle index of an order-2 tensor.
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Position of this index among all middle slices in canonical order (0-based).
    pub fn flat(&self, middle_shape: &[usize]) -> Result<usize> {
        if self.0.len() != middle_shape.len() {
            return Err(Error::IndexOutOfBounds(format!(
                "middle index {:?} needs {} entries",
                self.0,
                middle_shape.len()
            )));
        }
        let mut m = 0;
        for (&i, &n) in self.0.iter().zip(middle_shape) {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfBounds(format!(
                    "middle index {:?} outside {middle_shape:?}",
                    self.0
                )));
            }
            m = m * n + (i - 1);
        }
        Ok(m)
    }

    pub fn from_flat(mut m: usize, middle_shape: &[usize]) -> Self {
        let mut idx = vec![0; middle_shape.len()];
        for k in (0..middle_shape.len()).rev() {
            idx[k] = m % middle_shape[k] + 1;
            m /= middle_shape[k];
        }
        Self(idx)
    }
}

/// Stack of `rows x cols` matrices indexed by the flattened middle index.
///
/// This is the slice-major view used in the transform domain, where all
/// products and factorizations act slice by slice.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceStack<T: Scalar> {
    pub(crate) middle: Vec<usize>,
    pub(crate) slices: Vec<DMatrix<T>>,
}

impl<T: ComplexField + Copy> SliceStack<T> {
    pub(crate) fn gather(data: &[T], shape: &[usize]) -> Self {
        let order = shape.len();
        let rows = shape[0];
        let cols = shape[order - 1];
        let middle: Vec<usize> = if order <= 2 {
            Vec::new()
        } else {
            shape[1..order - 1].to_vec()
        };
        let mid: usize = middle.iter().product();
        let mut slices = vec![DMatrix::<T>::zeros(rows, cols); mid];
        let mut it = data.iter();
        for i in 0..rows {
            for s in slices.iter_mut() {
                for j in 0..cols {
                    s[(i, j)] = *it.next().expect("data sized by shape");
                }
            }
        }
        Self { middle, slices }
    }

    pub(crate) fn scatter(&self) -> (Vec<usize>, Vec<T>) {
        let rows = self.rows();
        let cols = self.cols();
        let mut shape = Vec::with_capacity(self.middle.len() + 2);
        shape.push(rows);
        shape.extend_from_slice(&self.middle);
        shape.push(cols);
        let mut data = Vec::with_capacity(rows * cols * self.slices.len());
        for i in 0..rows {
            for s in &self.slices {
                for j in 0..cols {
                    data.push(s[(i, j)]);
                }
            }
        }
        (shape, data)
    }
}

impl<T: Scalar> SliceStack<T> {
    pub fn rows(&self) -> usize {
        self.slices[0].nrows()
    }

    pub fn cols(&self) -> usize {
        self.slices[0].ncols()
    }

    pub fn middle_shape(&self) -> &[usize] {
        &self.middle
    }

    pub fn slices(&self) -> &[DMatrix<T>] {
        &self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub(crate) fn from_parts(middle: Vec<usize>, slices: Vec<DMatrix<T>>) -> Self {
        debug_assert_eq!(middle.iter().product::<usize>(), slices.len());
        Self { middle, slices }
    }
}

impl SliceStack<f64> {
    pub fn from_tensor(t: &DenseTensor) -> Result<Self> {
        t.require_sliceable()?;
        Ok(Self::gather(&t.data, &t.shape))
    }

    pub fn to_tensor(&self) -> DenseTensor {
        let (shape, data) = self.scatter();
        DenseTensor { shape, data }
    }
}

impl SliceStack<Complex64> {
    pub fn from_complex_tensor(t: &ComplexTensor) -> Result<Self> {
        if t.shape.len() < 2 {
            return shape_err("middle slices need an order ≥ 2 tensor");
        }
        Ok(Self::gather(&t.data, &t.shape))
    }

    pub fn to_complex_tensor(&self) -> ComplexTensor {
        let (shape, data) = self.scatter();
        ComplexTensor { shape, data }
    }
}

/// Mode-n product `(M)_n . T`: every mode-n fiber of `t` is multiplied by `m`.
pub fn mode_n_product(m: &DMatrix<f64>, t: &DenseTensor, n: usize) -> Result<DenseTensor> {
    let axis = mode_check(n, t.order())?;
    let (_, len, inner) = split_at_axis(&t.shape, axis);
    if m.ncols() != len {
        return shape_err(format!(
            "matrix has {} columns but mode {n} has length {len}",
            m.ncols()
        ));
    }
    let j = m.nrows();
    let mut shape = t.shape.clone();
    shape[axis] = j;
    let mt = m.transpose();
    let mut data = vec![0.0; shape.iter().product()];
    data.par_chunks_mut(j * inner)
        .zip(t.data.par_chunks(len * inner))
        .for_each(|(out, block)| {
            // row-major len x inner block, read as its column-major transpose
            let bt = DMatrixView::from_slice(block, inner, len);
            let prod = bt * &mt;
            out.copy_from_slice(prod.as_slice());
        });
    Ok(DenseTensor { shape, data })
}

/// Applies one matrix per listed mode, in ascending mode order.
pub fn multi_mode_product(
    t: &DenseTensor,
    factors: &[(usize, &DMatrix<f64>)],
) -> Result<DenseTensor> {
    let mut sorted: Vec<_> = factors.to_vec();
    sorted.sort_by_key(|(n, _)| *n);
    let mut out = t.clone();
    for (n, m) in sorted {
        out = mode_n_product(m, &out, n)?;
    }
    Ok(out)
}

/// Contraction `⟨A, B⟩_{modes_a; modes_b}`: sums over paired modes; the result is
/// indexed by the free modes of `a` followed by the free modes of `b`. Contracting
/// every mode of both operands gives a one-element tensor.
pub fn contract(
    a: &DenseTensor,
    b: &DenseTensor,
    modes_a: &[usize],
    modes_b: &[usize],
) -> Result<DenseTensor> {
    if modes_a.len() != modes_b.len() {
        return invalid(format!(
            "contraction lists have different lengths: {modes_a:?} vs {modes_b:?}"
        ));
    }
    let ca = contraction_axes(modes_a, a.order())?;
    let cb = contraction_axes(modes_b, b.order())?;
    for (&x, &y) in ca.iter().zip(&cb) {
        if a.shape[x] != b.shape[y] {
            return shape_err(format!(
                "contracted mode {} of A has length {} but mode {} of B has length {}",
                x + 1,
                a.shape[x],
                y + 1,
                b.shape[y]
            ));
        }
    }
    let free_a: Vec<usize> = (0..a.order()).filter(|k| !ca.contains(k)).collect();
    let free_b: Vec<usize> = (0..b.order()).filter(|k| !cb.contains(k)).collect();

    let perm_a: Vec<usize> = free_a.iter().chain(&ca).map(|k| k + 1).collect();
    let perm_b: Vec<usize> = free_b.iter().chain(&cb).map(|k| k + 1).collect();
    let pa = permute_data(&a.data, &a.shape, &perm_a);
    let pb = permute_data(&b.data, &b.shape, &perm_b);

    let fa: usize = free_a.iter().map(|&k| a.shape[k]).product();
    let fb: usize = free_b.iter().map(|&k| b.shape[k]).product();
    let kk: usize = ca.iter().map(|&k| a.shape[k]).product();

    let at = DMatrixView::from_slice(&pa, kk, fa);
    let bt = DMatrixView::from_slice(&pb, kk, fb);
    // column-major fb x fa == row-major fa x fb
    let r = bt.tr_mul(&at);

    let mut shape: Vec<usize> = free_a.iter().map(|&k| a.shape[k]).collect();
    shape.extend(free_b.iter().map(|&k| b.shape[k]));
    if shape.is_empty() {
        shape.push(1);
    }
    DenseTensor::new(shape, r.as_slice().to_vec())
}

fn contraction_axes(modes: &[usize], order: usize) -> Result<Vec<usize>> {
    let mut axes = Vec::with_capacity(modes.len());
    for &m in modes {
        let ax = mode_check(m, order)?;
        if axes.contains(&ax) {
            return invalid(format!("mode {m} repeated in contraction list {modes:?}"));
        }
        axes.push(ax);
    }
    Ok(axes)
}

/// Transpose with respect to the reflective-boundary product: swaps modes 1 and N.
pub fn tc_transpose(a: &DenseTensor) -> Result<DenseTensor> {
    let n = a.order();
    if n < 2 {
        return shape_err("transpose needs an order ≥ 2 tensor");
    }
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.swap(0, n - 1);
    a.permute(&perm)
}

/// Transpose with respect to the periodic-boundary product: swaps modes 1 and N and
/// reverses every middle index modulo its length (`i -> (n + 2 - i) mod n`, 1-based).
pub fn t_transpose(a: &DenseTensor) -> Result<DenseTensor> {
    let swapped = tc_transpose(a)?;
    if a.order() <= 2 {
        return Ok(swapped);
    }
    let mid = swapped.middle_shape().to_vec();
    let mut out = swapped.clone();
    for m in 0..swapped.middle_count() {
        let idx = MiddleIndex::from_flat(m, &mid);
        let src: Vec<usize> = idx
            .as_slice()
            .iter()
            .zip(&mid)
            .map(|(&i, &n)| (n + 1 - i) % n + 1)
            .collect();
        let s = swapped.middle_slice(&MiddleIndex::new(src))?;
        out.set_middle_slice(&idx, &s)?;
    }
    Ok(out)
}

pub(crate) fn check_conformable(a: &DenseTensor, b: &DenseTensor, what: &str) -> Result<()> {
    if a.order() != b.order() {
        return shape_err(format!(
            "{what}: operand orders differ ({} vs {})",
            a.order(),
            b.order()
        ));
    }
    if a.order() < 2 {
        return shape_err(format!("{what}: operands must have order ≥ 2"));
    }
    if a.middle_shape() != b.middle_shape() {
        return shape_err(format!(
            "{what}: middle modes differ ({:?} vs {:?})",
            a.middle_shape(),
            b.middle_shape()
        ));
    }
    let j = a.shape[a.order() - 1];
    if j != b.shape[0] {
        return shape_err(format!(
            "{what}: inner dimensions do not conform ({j} vs {})",
            b.shape[0]
        ));
    }
    Ok(())
}

/// Slice-wise product over the middle modes: each result slice is the matrix product
/// of the corresponding slices of `a` and `b`.
pub fn slicewise_product(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    check_conformable(a, b, "slicewise product")?;
    let sa = SliceStack::from_tensor(a)?;
    let sb = SliceStack::from_tensor(b)?;
    let slices = sa
        .slices
        .par_iter()
        .zip(&sb.slices)
        .map(|(x, y)| x * y)
        .collect();
    Ok(SliceStack::from_parts(sa.middle.clone(), slices).to_tensor())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(shape: &[usize]) -> DenseTensor {
        let n: usize = shape.iter().product();
        DenseTensor::new(shape.to_vec(), (0..n).map(|x| x as f64 * 0.5 - 3.0).collect()).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(DenseTensor::new(vec![2, 3], vec![0.0; 5]).is_err());
        assert!(DenseTensor::zeros(&[2, 0]).is_err());
        assert!(DenseTensor::zeros(&[]).is_err());
    }

    #[test]
    fn last_index_fastest() {
        let t = seq(&[2, 3]);
        assert_eq!(t.get(&[1, 2]).unwrap(), t.data()[1]);
        assert_eq!(t.get(&[2, 1]).unwrap(), t.data()[3]);
        assert!(t.get(&[3, 1]).is_err());
        assert!(t.get(&[0, 1]).is_err());
    }

    #[test]
    fn mode_product_identity_and_column_sums() {
        let t = seq(&[2, 3, 4]);
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(mode_n_product(&id, &t, 2).unwrap(), t);

        let m = DenseTensor::from_fn(&[2, 3], |i| (i[0] * 10 + i[1]) as f64).unwrap();
        let ones = DMatrix::from_element(1, 2, 1.0);
        let s = mode_n_product(&ones, &m, 1).unwrap();
        assert_eq!(s.shape(), &[1, 3]);
        for j in 1..=3 {
            let expect = m.get(&[1, j]).unwrap() + m.get(&[2, j]).unwrap();
            assert_eq!(s.get(&[1, j]).unwrap(), expect);
        }
    }

    #[test]
    fn mode_product_errors() {
        let t = seq(&[2, 3]);
        assert!(matches!(
            mode_n_product(&DMatrix::identity(2, 2), &t, 3),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(mode_n_product(&DMatrix::identity(2, 2), &t, 2).is_err());
    }

    #[test]
    fn contraction_of_matrices_is_a_times_b_transpose() {
        let a = seq(&[2, 3]);
        let b = DenseTensor::from_fn(&[4, 3], |i| (i[0] as f64) - 2.0 * i[1] as f64).unwrap();
        let c = contract(&a, &b, &[2], &[2]).unwrap();
        let expect = a.to_matrix().unwrap() * b.to_matrix().unwrap().transpose();
        assert_eq!(c.to_matrix().unwrap(), expect);
    }

    #[test]
    fn full_contraction_is_inner_product() {
        let a = seq(&[2, 3, 2]);
        let b = a.scale(-0.25);
        let c = contract(&a, &b, &[1, 2, 3], &[1, 2, 3]).unwrap();
        assert_eq!(c.shape(), &[1]);
        assert!((c.data()[0] - a.inner(&b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn contraction_errors() {
        let a = seq(&[2, 3]);
        assert!(contract(&a, &a, &[1, 1], &[1, 2]).is_err());
        assert!(contract(&a, &a, &[1], &[2]).is_err());
        assert!(contract(&a, &a, &[1], &[1, 2]).is_err());
    }

    #[test]
    fn middle_slice_roundtrip_and_order3_frontal() {
        let t = seq(&[2, 3, 4, 2]);
        let mut back = DenseTensor::zeros(t.shape()).unwrap();
        let mut energy = 0.0;
        for idx in t.middle_indices() {
            let s = t.middle_slice(&idx).unwrap();
            energy += s.norm_squared();
            back.set_middle_slice(&idx, &s).unwrap();
        }
        assert_eq!(back, t);
        assert!((energy - t.frobenius_norm().powi(2)).abs() < 1e-9);

        let t3 = seq(&[2, 3, 4]);
        let s = t3.middle_slice(&MiddleIndex::new(vec![2])).unwrap();
        assert_eq!(s[(1, 3)], t3.get(&[2, 2, 4]).unwrap());
        assert!(t3.middle_slice(&MiddleIndex::new(vec![4])).is_err());

        let m = seq(&[3, 2]);
        assert_eq!(m.middle_count(), 1);
        assert_eq!(
            m.middle_slice(&MiddleIndex::empty()).unwrap(),
            m.to_matrix().unwrap()
        );
    }

    #[test]
    fn transposes() {
        let m = seq(&[2, 3]);
        assert_eq!(
            tc_transpose(&m).unwrap().to_matrix().unwrap(),
            m.to_matrix().unwrap().transpose()
        );
        let t = seq(&[2, 3, 4]);
        let tt = tc_transpose(&t).unwrap();
        assert_eq!(tt.shape(), &[4, 3, 2]);
        assert_eq!(tt.get(&[4, 2, 1]).unwrap(), t.get(&[1, 2, 4]).unwrap());
        assert_eq!(tc_transpose(&tt).unwrap(), t);

        let r = t_transpose(&t).unwrap();
        // slice 1 stays, slice 2 <- slice 3, slice 3 <- slice 2
        assert_eq!(r.get(&[4, 1, 2]).unwrap(), t.get(&[2, 1, 4]).unwrap());
        assert_eq!(r.get(&[4, 2, 2]).unwrap(), t.get(&[2, 3, 4]).unwrap());
        assert_eq!(t_transpose(&r).unwrap(), t);
        assert!(tc_transpose(&DenseTensor::zeros(&[3]).unwrap()).is_err());
    }

    #[test]
    fn slicewise_identity_and_matrix_case() {
        let a = seq(&[2, 3, 4]);
        let mut eye = DenseTensor::zeros(&[4, 3, 4]).unwrap();
        for idx in eye.middle_indices().collect::<Vec<_>>() {
            eye.set_middle_slice(&idx, &DMatrix::identity(4, 4)).unwrap();
        }
        assert_eq!(slicewise_product(&a, &eye).unwrap(), a);

        let x = seq(&[2, 1, 3]);
        let y = seq(&[3, 1, 2]);
        let p = slicewise_product(&x, &y).unwrap();
        let xm = x.clone().reshape(&[2, 3]).unwrap().to_matrix().unwrap();
        let ym = y.clone().reshape(&[3, 2]).unwrap().to_matrix().unwrap();
        assert_eq!(p.reshape(&[2, 2]).unwrap().to_matrix().unwrap(), xm * ym);

        assert!(slicewise_product(&a, &seq(&[3, 3, 4])).is_err());
        assert!(slicewise_product(&a, &seq(&[4, 2, 4])).is_err());
    }

    #[test]
    fn permute_rejects_bad_permutations() {
        let t = seq(&[2, 3, 4]);
        assert!(t.permute(&[1, 1, 2]).is_err());
        assert!(t.permute(&[1, 2]).is_err());
        assert_eq!(t.permute(&[1, 2, 3]).unwrap(), t);
    }
}
