//! Dense tensors, tensor-valued time series, and the multilinear primitives
//! the estimators are built on: mode-k unfolding and folding, mode-k products
//! and Kronecker products.
//!
//! Storage is column-major throughout (the first index varies fastest) and
//! every unfolding enumerates the remaining modes in the same first-fastest
//! order. This ties the mode-k matricization of a multilinear product to the
//! descending-order Kronecker product of the per-mode matrices:
//!
//! ```text
//! mat_k(F x_1 A_1 ... x_K A_K) = A_k mat_k(F) (A_K kron ... kron A_{k+1}
//!                                              kron A_{k-1} kron ... kron A_1)^T
//! ```
//!
//! Modes are 0-based in this API; the 1-based convention of the written
//! definitions is confined to [`linear_index`].

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense column-major `f64` matrix used throughout the crate.
pub type Matrix = DMatrix<f64>;

/// A dense K-mode tensor of `f64`, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    /// Builds a tensor from its shape and column-major data.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::domain("tensor must have at least one mode"));
        }
        if shape.contains(&0) {
            return Err(Error::domain("all mode sizes must be positive"));
        }
        let n: usize = shape.iter().product();
        if data.len() != n {
            return Err(Error::domain(format!(
                "data length {} does not match shape product {}",
                data.len(),
                n
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let n: usize = shape.iter().product();
        Self::new(shape, vec![0.0; n])
    }

    /// Number of modes K.
    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Total number of entries.
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

    /// Entry at a 0-based multi-index.
    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut off = 0;
        let mut stride = 1;
        for (i, &p) in idx.iter().zip(&self.shape) {
            debug_assert!(*i < p);
            off += i * stride;
            stride *= p;
        }
        self.data[off]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.shape.len() {
            return Err(Error::domain(format!(
                "mode {} out of range for order-{} tensor",
                mode,
                self.shape.len()
            )));
        }
        Ok(())
    }

    /// Mode-k unfolding: a `p_k x p_{-k}` matrix whose columns are the mode-k
    /// fibers, enumerated with the remaining indices first-fastest.
    pub fn unfold(&self, mode: usize) -> Result<Matrix> {
        self.check_mode(mode)?;
        let pk = self.shape[mode];
        let p_minus = self.len() / pk;
        let inner: usize = self.shape[..mode].iter().product();
        let outer: usize = self.shape[mode + 1..].iter().product();
        if mode == 0 {
            // Already laid out as a p_0 x p_{-0} column-major matrix.
            return Ok(Matrix::from_column_slice(pk, p_minus, &self.data));
        }
        let mut m = Matrix::zeros(pk, p_minus);
        for o in 0..outer {
            for i in 0..pk {
                let src = (o * pk + i) * inner;
                for n in 0..inner {
                    m[(i, o * inner + n)] = self.data[src + n];
                }
            }
        }
        Ok(m)
    }

    /// Inverse of [`unfold`](Self::unfold): rebuilds the tensor of `shape`
    /// from its mode-k unfolding. Exact (a permutation of entries).
    pub fn fold(m: &Matrix, mode: usize, shape: &[usize]) -> Result<Self> {
        if mode >= shape.len() {
            return Err(Error::domain(format!(
                "mode {} out of range for order-{} shape",
                mode,
                shape.len()
            )));
        }
        let pk = shape[mode];
        let total: usize = shape.iter().product();
        let p_minus = total / pk;
        if m.nrows() != pk || m.ncols() != p_minus {
            return Err(Error::domain(format!(
                "matrix {}x{} does not match mode-{} unfolding of shape {:?}",
                m.nrows(),
                m.ncols(),
                mode,
                shape
            )));
        }
        let inner: usize = shape[..mode].iter().product();
        let outer: usize = shape[mode + 1..].iter().product();
        let mut data = vec![0.0; total];
        for o in 0..outer {
            for i in 0..pk {
                let dst = (o * pk + i) * inner;
                for n in 0..inner {
                    data[dst + n] = m[(i, o * inner + n)];
                }
            }
        }
        Self::new(shape.to_vec(), data)
    }

    /// Mode-k product with a `d x p_k` matrix; the k-th mode size becomes `d`.
    pub fn mode_product(&self, a: &Matrix, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if a.ncols() != self.shape[mode] {
            return Err(Error::domain(format!(
                "mode-{} product: matrix has {} columns but mode size is {}",
                mode,
                a.ncols(),
                self.shape[mode]
            )));
        }
        let unfolded = self.unfold(mode)?;
        let product = a * unfolded;
        let mut new_shape = self.shape.clone();
        new_shape[mode] = a.nrows();
        Self::fold(&product, mode, &new_shape)
    }

    /// Entry-wise scaling, in place.
    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }
}

/// A time-indexed sequence of equally shaped dense tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSeries {
    shape: Vec<usize>,
    slices: Vec<DenseTensor>,
}

impl TensorSeries {
    pub fn new(slices: Vec<DenseTensor>) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::domain("series must contain at least one slice"))?;
        let shape = first.shape().to_vec();
        if slices.iter().any(|s| s.shape() != shape.as_slice()) {
            return Err(Error::domain("all slices must share one shape"));
        }
        Ok(Self { shape, slices })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    /// Number of time slices T.
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn slices(&self) -> &[DenseTensor] {
        &self.slices
    }

    pub fn slice(&self, t: usize) -> &DenseTensor {
        &self.slices[t]
    }

    /// Entries per slice.
    pub fn slice_len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn all_finite(&self) -> bool {
        self.slices.iter().all(DenseTensor::all_finite)
    }

    /// A new series holding `f` applied to every slice.
    pub fn map_slices<F>(&self, f: F) -> Result<TensorSeries>
    where
        F: FnMut(&DenseTensor) -> Result<DenseTensor>,
    {
        let slices = self.slices.iter().map(f).collect::<Result<Vec<_>>>()?;
        TensorSeries::new(slices)
    }

    /// Sub-series `[start, end)` (slices are cloned).
    pub fn window(&self, start: usize, end: usize) -> Result<TensorSeries> {
        if start >= end || end > self.len() {
            return Err(Error::domain(format!(
                "window [{start}, {end}) out of range for series of length {}",
                self.len()
            )));
        }
        TensorSeries::new(self.slices[start..end].to_vec())
    }
}

/// Column-major ravel of a 1-based multi-index:
/// `h(m_1, ..., m_N) = m_1 + (m_2 - 1) I_1 + ... + (m_N - 1) I_1 ... I_{N-1}`.
///
/// Bijective from the index box onto `1..=prod(dims)`. This is the single
/// place where 1-based indexing enters the API; everything else is 0-based.
pub fn linear_index(multi_index: &[usize], dims: &[usize]) -> Result<usize> {
    if multi_index.len() != dims.len() {
        return Err(Error::domain(format!(
            "index has {} components but {} extents were given",
            multi_index.len(),
            dims.len()
        )));
    }
    let mut acc = 1usize;
    let mut stride = 1usize;
    for (j, (&m, &dim)) in multi_index.iter().zip(dims).enumerate() {
        if m < 1 || m > dim {
            return Err(Error::domain(format!(
                "index {} out of range 1..={} at position {}",
                m,
                dim,
                j + 1
            )));
        }
        acc += (m - 1) * stride;
        stride *= dim;
    }
    Ok(acc)
}

/// Kronecker product `a kron b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Kronecker product of `mats` in descending mode order with mode `k` left
/// out: `A_K kron ... kron A_{k+1} kron A_{k-1} kron ... kron A_1`.
///
/// For a single mode (K = 1) this is the 1x1 identity.
pub fn kron_excluding(mats: &[Matrix], k: usize) -> Result<Matrix> {
    if k >= mats.len() {
        return Err(Error::domain(format!(
            "mode {} out of range for {} matrices",
            k,
            mats.len()
        )));
    }
    let mut acc = Matrix::identity(1, 1);
    for j in (0..mats.len()).rev() {
        if j == k {
            continue;
        }
        acc = acc.kronecker(&mats[j]);
    }
    Ok(acc)
}
