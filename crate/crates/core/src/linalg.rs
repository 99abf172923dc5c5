//! Dense matrices and singular value decompositions.
//!
//! [`Matrix`] is the public row-major type. The SVD kernels work on
//! column-major storage internally so that a tensor's buffer can be viewed
//! as its mode-1 (or transposed mode-3) matricization without copying.
//!
//! Two SVD routes exist:
//!
//! * a direct route: Householder QR of the tall orientation followed by
//!   one-sided Jacobi on the triangular factor. Accurate to working
//!   precision, cost `O(m k^2)` for an `m x k` tall matrix;
//! * a block subspace iteration for the leading `r` triplets of matrices
//!   whose short side is large, with a residual-based stopping rule and a
//!   fall-back to the direct route when it does not converge.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use rand::Rng;

use crate::error::{mismatch, Error, Result};
use crate::math::{axpy, dot, norm, sqrt};
use crate::rng;

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(mismatch(rows * cols, data.len()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(mismatch(cols, r.len()));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(mismatch(
                format_args!("{} rows on the right operand", self.cols),
                other.rows,
            ));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(k), out_row);
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · self`
    pub fn gram(&self) -> Matrix {
        let mut g = Matrix::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..self.cols {
                if r[a] != 0.0 {
                    axpy(r[a], r, g.row_mut(a));
                }
            }
        }
        g
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    /// Largest absolute entry-wise difference; `inf` when shapes differ.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// The first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        Matrix::from_fn(self.rows, k.min(self.cols), |i, j| self[(i, j)])
    }

    /// `‖selfᵀ self − I‖_max`, i.e. how far the columns are from orthonormal.
    pub fn orthonormality_defect(&self) -> f64 {
        self.gram().max_abs_diff(&Matrix::identity(self.cols))
    }

    #[cfg(test)]
    pub(crate) fn to_col_mat(&self) -> ColMat {
        ColMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Leading singular triplets of a matrix.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    /// `rows x r`, orthonormal columns.
    pub u: Matrix,
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// `cols x r`, orthonormal columns.
    pub v: Matrix,
}

/// Best rank-`r` approximation factors of `m`.
///
/// Signs are fixed so that the largest-magnitude entry of every left
/// singular vector is positive.
pub fn truncated_svd(m: &Matrix, r: usize) -> Result<TruncatedSvd> {
    let kmax = m.rows.min(m.cols);
    if r == 0 || r > kmax {
        return Err(Error::InvalidRank { rank: r, max: kmax });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix"));
    }
    // Row-major `m` is the column-major storage of `mᵀ`.
    let view = ColView { rows: m.cols, cols: m.rows, data: &m.data };
    let svd_t = svd_leading(view, r, SvdOptions::STRICT);
    let mut svd = Svd { u: svd_t.v, s: svd_t.s, v: svd_t.u };
    svd.fix_signs();
    Ok(TruncatedSvd {
        u: svd.u.to_matrix(),
        singular_values: svd.s,
        v: svd.v.to_matrix(),
    })
}

// ---------------------------------------------------------------------------
// Column-major internals.

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ColMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl ColMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ColMat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        ColMat { rows, cols, data }
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn view(&self) -> ColView<'_> {
        ColView { rows: self.rows, cols: self.cols, data: &self.data }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    pub fn leading_columns(mut self, k: usize) -> ColMat {
        let k = k.min(self.cols);
        self.data.truncate(k * self.rows);
        self.cols = k;
        self
    }

    /// Copies the column pair `(a, b)` out, mutably.
    fn two_cols(&mut self, a: usize, b: usize) -> (&mut [f64], &mut [f64]) {
        debug_assert!(a < b);
        let rows = self.rows;
        let (lo, hi) = self.data.split_at_mut(b * rows);
        (&mut lo[a * rows..(a + 1) * rows], &mut hi[..rows])
    }
}

/// Borrowed column-major matrix.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ColView<'a> {
    pub rows: usize,
    pub cols: usize,
    pub data: &'a [f64],
}

impl<'a> ColView<'a> {
    #[inline]
    pub fn col(&self, j: usize) -> &'a [f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn to_owned(self) -> ColMat {
        ColMat { rows: self.rows, cols: self.cols, data: self.data.to_vec() }
    }

    pub fn transpose(self) -> ColMat {
        let mut out = ColMat::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            let c = self.col(j);
            for i in 0..self.rows {
                out.data[i * self.cols + j] = c[i];
            }
        }
        out
    }

    /// `self · x`
    pub fn mul(&self, x: &ColMat) -> ColMat {
        debug_assert_eq!(self.cols, x.rows);
        let mut y = ColMat::zeros(self.rows, x.cols);
        for j in 0..self.cols {
            let a = self.col(j);
            for k in 0..x.cols {
                let s = x.get(j, k);
                if s != 0.0 {
                    axpy(s, a, y.col_mut(k));
                }
            }
        }
        y
    }

    /// `selfᵀ · y`
    pub fn mul_t(&self, y: &ColMat) -> ColMat {
        debug_assert_eq!(self.rows, y.rows);
        let mut z = ColMat::zeros(self.cols, y.cols);
        for j in 0..self.cols {
            let a = self.col(j);
            for k in 0..y.cols {
                z.data[k * self.cols + j] = dot(a, y.col(k));
            }
        }
        z
    }
}

/// Thin SVD pieces in column-major form.
#[derive(Debug, Clone)]
pub(crate) struct Svd {
    pub u: ColMat,
    pub s: Vec<f64>,
    pub v: ColMat,
}

impl Svd {
    /// Makes the largest-magnitude entry of each left vector positive.
    pub fn fix_signs(&mut self) {
        for k in 0..self.u.cols {
            let col = self.u.col(k);
            let mut best = 0usize;
            for (i, x) in col.iter().enumerate() {
                if x.abs() > col[best].abs() {
                    best = i;
                }
            }
            if col.get(best).is_some_and(|&x| x < 0.0) {
                self.u.col_mut(k).iter_mut().for_each(|x| *x = -*x);
                if k < self.v.cols {
                    self.v.col_mut(k).iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
    }

    fn truncate(mut self, r: usize) -> Svd {
        self.u = self.u.leading_columns(r);
        self.v = self.v.leading_columns(r);
        self.s.truncate(r);
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SvdOptions {
    /// Residual tolerance relative to the largest singular value.
    pub tol: f64,
    pub max_iter: usize,
    /// Fall back to the direct route when iteration does not converge.
    pub fallback: bool,
}

impl SvdOptions {
    pub const STRICT: SvdOptions = SvdOptions { tol: 1e-13, max_iter: 500, fallback: true };
    /// Good enough for initializing an alternating scheme.
    pub const LOOSE: SvdOptions = SvdOptions { tol: 1e-5, max_iter: 25, fallback: false };
}

const DIRECT_LIMIT: usize = 160;
const OVERSAMPLE: usize = 8;

/// Leading `r` singular triplets, `r <= min(rows, cols)`.
pub(crate) fn svd_leading(a: ColView<'_>, r: usize, opts: SvdOptions) -> Svd {
    let kmin = a.rows.min(a.cols);
    debug_assert!(r <= kmin);
    if kmin <= DIRECT_LIMIT || 2 * (r + OVERSAMPLE) >= kmin {
        return svd_direct(a).truncate(r);
    }
    match svd_subspace(a, r, opts) {
        Some(svd) => svd,
        None => svd_direct(a).truncate(r),
    }
}

/// Leading `r` left singular vectors with `r` allowed up to `rows`; when the
/// matrix has fewer than `r` singular directions the basis is completed with
/// orthonormal vectors. Returns the vectors and the available singular values.
pub(crate) fn leading_left(a: ColView<'_>, r: usize, opts: SvdOptions) -> (ColMat, Vec<f64>) {
    let kmin = a.rows.min(a.cols);
    let mut svd = svd_leading(a, r.min(kmin), opts);
    svd.fix_signs();
    let mut u = svd.u;
    if r > u.cols {
        let mut data = u.data;
        data.resize(a.rows * r, 0.0);
        u = ColMat { rows: a.rows, cols: r, data };
        complete_orthonormal(&mut u, kmin);
    }
    (u, svd.s)
}

/// Leading `r` right singular vectors (the left vectors of the transpose),
/// completed like [`leading_left`] when `r` exceeds the available rank.
pub(crate) fn leading_right(a: ColView<'_>, r: usize, opts: SvdOptions) -> (ColMat, Vec<f64>) {
    let kmin = a.rows.min(a.cols);
    let svd = svd_leading(a, r.min(kmin), opts);
    let mut t = Svd { u: svd.v, s: svd.s, v: svd.u };
    t.fix_signs();
    let mut v = t.u;
    if r > v.cols {
        let mut data = v.data;
        data.resize(a.cols * r, 0.0);
        v = ColMat { rows: a.cols, cols: r, data };
        complete_orthonormal(&mut v, kmin);
    }
    (v, t.s)
}

/// Full thin SVD through QR + one-sided Jacobi.
pub(crate) fn svd_direct(a: ColView<'_>) -> Svd {
    if a.rows >= a.cols {
        svd_direct_tall(a.to_owned())
    } else {
        let t = svd_direct_tall(a.transpose());
        let mut svd = Svd { u: t.v, s: t.s, v: t.u };
        svd.fix_signs();
        svd
    }
}

fn svd_direct_tall(mut a: ColMat) -> Svd {
    let (m, k) = (a.rows, a.cols);
    let qr = householder_qr(&mut a);
    let r = ColMat::from_fn(k, k, |i, j| if i <= j { a.get(i, j) } else { 0.0 });
    let (ur, s, v) = one_sided_jacobi(r);
    let mut u = ColMat::zeros(m, k);
    for j in 0..k {
        u.col_mut(j)[..k].copy_from_slice(ur.col(j));
    }
    qr.apply_q(&mut u);
    let mut svd = Svd { u, s, v };
    svd.fix_signs();
    svd
}

struct Householder {
    /// Reflector `j` acts on rows `j..m`.
    vs: Vec<Vec<f64>>,
    betas: Vec<f64>,
}

/// In-place QR: on return the upper triangle of `a` holds `R`.
fn householder_qr(a: &mut ColMat) -> Householder {
    let (m, k) = (a.rows, a.cols.min(a.rows));
    let mut vs = Vec::with_capacity(k);
    let mut betas = Vec::with_capacity(k);
    for j in 0..k {
        let x = &a.col(j)[j..];
        let xnorm = norm(x);
        let mut v = x.to_vec();
        let beta;
        if xnorm == 0.0 {
            beta = 0.0;
        } else {
            let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
            v[0] -= alpha;
            let vv = dot(&v, &v);
            beta = if vv == 0.0 { 0.0 } else { 2.0 / vv };
            let col = a.col_mut(j);
            col[j] = alpha;
            col[j + 1..].iter_mut().for_each(|x| *x = 0.0);
        }
        if beta != 0.0 {
            for c in j + 1..a.cols {
                let col = &mut a.col_mut(c)[j..];
                let w = beta * dot(&v, col);
                axpy(-w, &v, col);
            }
        }
        vs.push(v);
        betas.push(beta);
    }
    let _ = m;
    Householder { vs, betas }
}

impl Householder {
    /// `x ← Q x`
    fn apply_q(&self, x: &mut ColMat) {
        for j in (0..self.vs.len()).rev() {
            let beta = self.betas[j];
            if beta == 0.0 {
                continue;
            }
            let v = &self.vs[j];
            for c in 0..x.cols {
                let col = &mut x.col_mut(c)[j..];
                let w = beta * dot(v, col);
                axpy(-w, v, col);
            }
        }
    }
}

/// Orthonormal basis for the column space of `y` (thin Q of its QR).
fn orthonormalize(mut y: ColMat) -> ColMat {
    let (m, p) = (y.rows, y.cols);
    let qr = householder_qr(&mut y);
    let mut q = ColMat::zeros(m, p);
    for j in 0..p.min(m) {
        q.col_mut(j)[j] = 1.0;
    }
    qr.apply_q(&mut q);
    q
}

/// Hestenes one-sided Jacobi on a square (or tall) matrix.
/// Returns `(U, sigma, V)` sorted by nonincreasing sigma.
fn one_sided_jacobi(mut a: ColMat) -> (ColMat, Vec<f64>, ColMat) {
    let k = a.cols;
    let mut v = ColMat::zeros(k, k);
    for j in 0..k {
        v.col_mut(j)[j] = 1.0;
    }
    let eps = f64::EPSILON;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let (ap, aq) = a.two_cols(p, q);
                let alpha = dot(ap, ap);
                let beta = dot(aq, aq);
                let gamma = dot(ap, aq);
                if alpha == 0.0 || beta == 0.0 || gamma.abs() <= eps * sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                rotate(ap, aq, c, s);
                let (vp, vq) = v.two_cols(p, q);
                rotate(vp, vq, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..k).map(|j| norm(a.col(j))).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let mut u = ColMat::zeros(a.rows, k);
    let mut vs = ColMat::zeros(k, k);
    let mut s = Vec::with_capacity(k);
    let mut rank = 0;
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        s.push(sigma);
        if sigma > 0.0 {
            rank += 1;
            let inv = 1.0 / sigma;
            for (o, x) in u.col_mut(dst).iter_mut().zip(a.col(src)) {
                *o = x * inv;
            }
        }
        vs.col_mut(dst).copy_from_slice(v.col(src));
    }
    complete_orthonormal(&mut u, rank);
    (u, s, vs)
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}

/// Replaces columns `filled..cols` of `u` with unit vectors orthogonal to
/// everything before them, drawn from the canonical basis.
fn complete_orthonormal(u: &mut ColMat, filled: usize) {
    let m = u.rows;
    let mut next_basis = 0usize;
    for j in filled..u.cols {
        loop {
            assert!(next_basis < m, "cannot complete more than {m} orthonormal columns");
            let mut cand = vec![0.0; m];
            cand[next_basis] = 1.0;
            next_basis += 1;
            // Two passes of Gram-Schmidt.
            for _ in 0..2 {
                for prev in 0..j {
                    let c = dot(u.col(prev), &cand);
                    axpy(-c, u.col(prev), &mut cand);
                }
            }
            let nrm = norm(&cand);
            if nrm > 0.5 {
                cand.iter_mut().for_each(|x| *x /= nrm);
                u.col_mut(j).copy_from_slice(&cand);
                break;
            }
        }
    }
}

/// Block subspace iteration. `None` when it fails to converge and the
/// options ask for a fall-back.
fn svd_subspace(a: ColView<'_>, r: usize, opts: SvdOptions) -> Option<Svd> {
    let kmin = a.rows.min(a.cols);
    let p = (r + OVERSAMPLE).min(kmin);
    let mut rng = rng::stream(0x5eed, &[rng::purpose::SVD_START, a.rows as u64, a.cols as u64]);
    let omega = ColMat::from_fn(a.cols, p, |_, _| rng.gen_range(-1.0..1.0));
    let mut q = orthonormalize(a.mul(&omega));
    let mut ritz: Option<(Vec<f64>, ColMat)> = None;

    for _ in 0..opts.max_iter {
        let z_raw = a.mul_t(&q);
        if let Some((s, v)) = &ritz {
            let scale = s[0].max(f64::MIN_POSITIVE);
            let worst = (0..r)
                .map(|i| {
                    let mut res = z_raw.col(i).to_vec();
                    axpy(-s[i], v.col(i), &mut res);
                    norm(&res) / scale
                })
                .fold(0.0, f64::max);
            if worst <= opts.tol {
                return Some(Svd { u: q, s: s.clone(), v: v.clone() }.truncate(r));
            }
        }
        let z = orthonormalize(z_raw);
        let y = a.mul(&z);
        let small = svd_direct(y.view());
        // Right Ritz vectors: Z · W.
        let v = z.view().mul(&small.v);
        q = small.u;
        ritz = Some((small.s, v));
    }

    let (s, v) = ritz?;
    if opts.fallback {
        None
    } else {
        Some(Svd { u: q, s, v }.truncate(r))
    }
}
