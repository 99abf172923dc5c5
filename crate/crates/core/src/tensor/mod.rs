//! Dense order-3 tensors.
//!
//! Storage is column-major: entry `(i, j, l)` lives at
//! `i + I1 * (j + I2 * l)`, so mode-1 fibers are contiguous and the whole
//! buffer, read column-major, is the mode-1 matricization.

pub mod tucker;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{mismatch, Error, Result};
use crate::linalg::{ColView, Matrix};
use crate::math::{axpy, dot, norm};

/// A tensor mode, `1`, `2` or `3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    One,
    Two,
    Three,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::One, Mode::Two, Mode::Three];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 1,
            Mode::Three => 2,
        }
    }
}

impl TryFrom<usize> for Mode {
    type Error = Error;

    fn try_from(m: usize) -> Result<Mode> {
        match m {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            3 => Ok(Mode::Three),
            _ => Err(Error::InvalidParameter(alloc::format!("mode {m} is not one of 1, 2, 3"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<f64>,
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor3").field("dims", &self.dims).finish_non_exhaustive()
    }
}

impl Tensor3 {
    pub fn zeros(dims: [usize; 3]) -> Self {
        Tensor3 { dims, data: vec![0.0; dims[0] * dims[1] * dims[2]] }
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for l in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    data.push(f(i, j, l));
                }
            }
        }
        Tensor3 { dims, data }
    }

    /// Wraps a column-major buffer. Every value must be finite.
    pub fn from_vec(dims: [usize; 3], data: Vec<f64>) -> Result<Self> {
        let expected = dims[0] * dims[1] * dims[2];
        if data.len() != expected {
            return Err(mismatch(
                format_args!("{expected} values for dims {dims:?}"),
                data.len(),
            ));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("tensor"));
        }
        Ok(Tensor3 { dims, data })
    }

    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, l: usize) -> usize {
        debug_assert!(i < self.dims[0] && j < self.dims[1] && l < self.dims[2]);
        i + self.dims[0] * (j + self.dims[1] * l)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.data[self.offset(i, j, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, l: usize, value: f64) {
        let o = self.offset(i, j, l);
        self.data[o] = value;
    }

    /// The `I1 x I2` slab of layer `l`, column-major.
    #[inline]
    pub fn layer(&self, l: usize) -> &[f64] {
        let s = self.dims[0] * self.dims[1];
        &self.data[l * s..(l + 1) * s]
    }

    #[inline]
    pub(crate) fn layer_mut(&mut self, l: usize) -> &mut [f64] {
        let s = self.dims[0] * self.dims[1];
        &mut self.data[l * s..(l + 1) * s]
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }

    /// Largest `|t(i,j,l) − t(j,i,l)|`; `inf` when `I1 != I2`.
    pub fn semi_symmetry_defect(&self) -> f64 {
        let [n1, n2, nl] = self.dims;
        if n1 != n2 {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for l in 0..nl {
            for j in 0..n2 {
                for i in 0..j {
                    worst = worst.max((self.get(i, j, l) - self.get(j, i, l)).abs());
                }
            }
        }
        worst
    }

    /// Average of the tensor and its mode-1/2 transpose.
    pub fn symmetrize_modes12(&self) -> Result<Tensor3> {
        let [n1, n2, nl] = self.dims;
        if n1 != n2 {
            return Err(mismatch(format_args!("I1 = I2 = {n1}"), format_args!("I2 = {n2}")));
        }
        let mut out = self.clone();
        for l in 0..nl {
            for j in 0..n2 {
                for i in 0..j {
                    let avg = 0.5 * (self.get(i, j, l) + self.get(j, i, l));
                    out.set(i, j, l, avg);
                    out.set(j, i, l, avg);
                }
            }
        }
        Ok(out)
    }

    /// Mode-`mode` matricization: `I_mode` rows, the product of the other
    /// two dimensions as columns. The remaining indices are ordered with the
    /// lower mode varying fastest, so for mode 1 entry `(i, j, l)` goes to
    /// column `j + I2 * l`, for mode 2 to `i + I1 * l` and for mode 3 to
    /// `i + I1 * j`.
    pub fn matricize(&self, mode: Mode) -> Matrix {
        let [n1, n2, n3] = self.dims;
        match mode {
            Mode::One => Matrix::from_fn(n1, n2 * n3, |i, c| self.get(i, c % n2, c / n2)),
            Mode::Two => Matrix::from_fn(n2, n1 * n3, |j, c| self.get(c % n1, j, c / n1)),
            Mode::Three => Matrix::from_fn(n3, n1 * n2, |l, c| self.get(c % n1, c / n1, l)),
        }
    }

    /// Inverse of [`Tensor3::matricize`].
    pub fn fold(m: &Matrix, mode: Mode, dims: [usize; 3]) -> Result<Tensor3> {
        let [n1, n2, n3] = dims;
        let (rows, cols) = match mode {
            Mode::One => (n1, n2 * n3),
            Mode::Two => (n2, n1 * n3),
            Mode::Three => (n3, n1 * n2),
        };
        if m.rows() != rows || m.cols() != cols {
            return Err(mismatch(
                format_args!("{rows}x{cols}"),
                format_args!("{}x{}", m.rows(), m.cols()),
            ));
        }
        let t = match mode {
            Mode::One => Tensor3::from_fn(dims, |i, j, l| m[(i, j + n2 * l)]),
            Mode::Two => Tensor3::from_fn(dims, |i, j, l| m[(j, i + n1 * l)]),
            Mode::Three => Tensor3::from_fn(dims, |i, j, l| m[(l, i + n1 * j)]),
        };
        Ok(t)
    }

    /// Mode-`mode` product `self ×_mode m`: the mode's dimension is replaced
    /// by `m.rows()`, and `matricize(result, mode) = m · matricize(self, mode)`.
    pub fn mode_product(&self, m: &Matrix, mode: Mode) -> Result<Tensor3> {
        let k = mode.index();
        if m.cols() != self.dims[k] {
            return Err(mismatch(
                format_args!("{} columns for mode {mode}", self.dims[k]),
                m.cols(),
            ));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(match mode {
            Mode::One => self.mode1_product(m),
            Mode::Two => self.mode2_product(m),
            Mode::Three => self.mode3_product(m),
        })
    }

    fn mode1_product(&self, m: &Matrix) -> Tensor3 {
        let [n1, n2, n3] = self.dims;
        let r = m.rows();
        let mut out = Tensor3::zeros([r, n2, n3]);
        for f in 0..n2 * n3 {
            let fiber = &self.data[f * n1..(f + 1) * n1];
            let dst = &mut out.data[f * r..(f + 1) * r];
            for (a, d) in dst.iter_mut().enumerate() {
                *d = dot(m.row(a), fiber);
            }
        }
        out
    }

    fn mode2_product(&self, m: &Matrix) -> Tensor3 {
        let [n1, _, n3] = self.dims;
        let r = m.rows();
        let mut out = Tensor3::zeros([n1, r, n3]);
        for l in 0..n3 {
            let src = self.layer(l);
            let dst = out.layer_mut(l);
            for b in 0..r {
                let dcol = &mut dst[b * n1..(b + 1) * n1];
                for (j, &w) in m.row(b).iter().enumerate() {
                    if w != 0.0 {
                        axpy(w, &src[j * n1..(j + 1) * n1], dcol);
                    }
                }
            }
        }
        out
    }

    fn mode3_product(&self, m: &Matrix) -> Tensor3 {
        let [n1, n2, _] = self.dims;
        let r = m.rows();
        let mut out = Tensor3::zeros([n1, n2, r]);
        for c in 0..r {
            let dst = out.layer_mut(c);
            for (l, &w) in m.row(c).iter().enumerate() {
                if w != 0.0 {
                    axpy(w, self.layer(l), dst);
                }
            }
        }
        out
    }

    /// Column-major view of the mode-1 matricization.
    pub(crate) fn mode1_view(&self) -> ColView<'_> {
        ColView { rows: self.dims[0], cols: self.dims[1] * self.dims[2], data: &self.data }
    }

    /// Column-major view of the transposed mode-3 matricization
    /// (`I1·I2` rows, `I3` columns).
    pub(crate) fn mode3_transposed_view(&self) -> ColView<'_> {
        ColView { rows: self.dims[0] * self.dims[1], cols: self.dims[2], data: &self.data }
    }

    /// Inner product with a tensor of the same shape.
    pub fn inner(&self, other: &Tensor3) -> Result<f64> {
        if self.dims != other.dims {
            return Err(mismatch(format_args!("{:?}", self.dims), format_args!("{:?}", other.dims)));
        }
        Ok(dot(&self.data, &other.data))
    }
}
