//! Tucker decomposition by HOSVD initialization and HOOI refinement.
//!
//! With `shared_mode12` the input is symmetrized over its first two modes
//! once, and a single factor serves both modes: each sweep updates it from
//! the mode-1 matricization of the tensor projected on modes 2 and 3.

use alloc::vec::Vec;

use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::{leading_left, leading_right, ColMat, Matrix, SvdOptions};
use crate::math::sqrt;
use crate::tensor::{Mode, Tensor3};

#[derive(Debug, Clone, Copy)]
pub struct TuckerOptions {
    /// Stop once the relative change of the reconstruction error drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Use one factor for modes 1 and 2.
    pub shared_mode12: bool,
}

impl Default for TuckerOptions {
    fn default() -> Self {
        TuckerOptions { tol: 1e-6, max_iter: 50, shared_mode12: false }
    }
}

impl TuckerOptions {
    pub fn shared() -> Self {
        TuckerOptions { shared_mode12: true, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct TuckerFactors {
    /// `r1 x r2 x r3`
    pub core: Tensor3,
    /// `I1 x r1`
    pub u: Matrix,
    /// `I2 x r2`; equal to `u` when `shared_mode12` is set.
    pub v: Matrix,
    /// `I3 x r3`
    pub w: Matrix,
    pub shared_mode12: bool,
    pub converged: bool,
    /// HOOI sweeps performed (rejected sweeps included).
    pub iterations: usize,
    /// Reconstruction error after initialization and after every accepted sweep.
    pub history: Vec<f64>,
    /// Singular values from the last update of each mode's factor.
    pub spectra: [Vec<f64>; 3],
}

impl TuckerFactors {
    /// `core ×₁ U ×₂ V ×₃ W`
    pub fn reconstruct(&self) -> Tensor3 {
        self.core
            .mode3_product_unchecked(&self.w)
            .mode2_product_unchecked(&self.v)
            .mode1_product_unchecked(&self.u)
    }

    /// Frobenius norm of `t − reconstruct()`, computed explicitly.
    pub fn residual_norm(&self, t: &Tensor3) -> Result<f64> {
        let r = self.reconstruct();
        if r.dims() != t.dims() {
            return Err(mismatch(format_args!("{:?}", r.dims()), format_args!("{:?}", t.dims())));
        }
        let s: f64 = r.as_slice().iter().zip(t.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok(sqrt(s))
    }

    /// Last recorded reconstruction error.
    pub fn error(&self) -> f64 {
        self.history.last().copied().unwrap_or(f64::NAN)
    }
}

impl Tensor3 {
    fn mode1_product_unchecked(&self, m: &Matrix) -> Tensor3 {
        self.mode_product(m, Mode::One).expect("shapes checked by caller")
    }
    fn mode2_product_unchecked(&self, m: &Matrix) -> Tensor3 {
        self.mode_product(m, Mode::Two).expect("shapes checked by caller")
    }
    fn mode3_product_unchecked(&self, m: &Matrix) -> Tensor3 {
        self.mode_product(m, Mode::Three).expect("shapes checked by caller")
    }

    /// Mode-2 matricization in column-major storage.
    fn mode2_col_mat(&self) -> ColMat {
        let [n1, n2, n3] = self.dims();
        ColMat::from_fn(n2, n1 * n3, |j, c| self.get(c % n1, j, c / n1))
    }
}

struct Factors {
    u: Matrix,
    v: Matrix,
    w: Matrix,
    core: Tensor3,
    err2: f64,
    spectra: [Vec<f64>; 3],
}

/// Tucker decomposition of `t` with multilinear ranks `ranks`.
///
/// Non-convergence within `max_iter` sweeps is not an error: the best
/// iterate is returned with `converged = false`.
pub fn tucker(t: &Tensor3, ranks: [usize; 3], opts: TuckerOptions) -> Result<TuckerFactors> {
    let dims = t.dims();
    for k in 0..3 {
        if ranks[k] == 0 || ranks[k] > dims[k] {
            return Err(Error::InvalidRank { rank: ranks[k], max: dims[k] });
        }
    }
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(invalid(format_args!("tolerance must be positive, got {}", opts.tol)));
    }
    if !t.as_slice().iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("tensor"));
    }
    if opts.shared_mode12 && (dims[0] != dims[1] || ranks[0] != ranks[1]) {
        return Err(invalid(format_args!(
            "a shared mode-1/2 factor needs I1 = I2 and r1 = r2, got dims {dims:?} ranks {ranks:?}"
        )));
    }

    let sym;
    let x = if opts.shared_mode12 {
        sym = t.symmetrize_modes12()?;
        &sym
    } else {
        t
    };
    let norm2 = {
        let n = x.frobenius_norm();
        n * n
    };

    let mut best = hosvd(x, ranks, opts.shared_mode12, norm2);
    let mut history = alloc::vec![sqrt(best.err2)];
    let mut converged = best.err2 <= 0.0;
    let mut iterations = 0;
    // Below this the error is dominated by cancellation in ‖x‖² − ‖core‖².
    let floor = 1e-6 * sqrt(norm2);

    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let next = hooi_sweep(x, ranks, opts.shared_mode12, &best, norm2);
        let prev_err = sqrt(best.err2);
        let err = sqrt(next.err2);
        let rel = (prev_err - err).abs() / prev_err.max(floor).max(f64::MIN_POSITIVE);
        if next.err2 > best.err2 + 1e-12 * norm2 {
            // Keep the best iterate; the error went up.
            converged = rel < opts.tol;
            break;
        }
        best = next;
        history.push(err);
        if rel < opts.tol {
            converged = true;
        }
    }

    Ok(TuckerFactors {
        core: best.core,
        v: best.v,
        u: best.u,
        w: best.w,
        shared_mode12: opts.shared_mode12,
        converged,
        iterations,
        history,
        spectra: best.spectra,
    })
}

fn finish(x: &Tensor3, u: Matrix, v: Matrix, w: Matrix, spectra: [Vec<f64>; 3], norm2: f64) -> Factors {
    let core = x
        .mode1_product_unchecked(&u.transpose())
        .mode2_product_unchecked(&v.transpose())
        .mode3_product_unchecked(&w.transpose());
    let c = core.frobenius_norm();
    let err2 = (norm2 - c * c).max(0.0);
    Factors { u, v, w, core, err2, spectra }
}

fn hosvd(x: &Tensor3, ranks: [usize; 3], shared: bool, norm2: f64) -> Factors {
    let opts = SvdOptions::LOOSE;
    let (u, s1) = leading_left(x.mode1_view(), ranks[0], opts);
    let (v, s2) = if shared {
        (u.clone(), s1.clone())
    } else {
        let m2 = x.mode2_col_mat();
        leading_left(m2.view(), ranks[1], opts)
    };
    let (w, s3) = leading_right(x.mode3_transposed_view(), ranks[2], opts);
    finish(x, u.to_matrix(), v.to_matrix(), w.to_matrix(), [s1, s2, s3], norm2)
}

fn hooi_sweep(x: &Tensor3, ranks: [usize; 3], shared: bool, cur: &Factors, norm2: f64) -> Factors {
    let opts = SvdOptions::STRICT;
    let wt = cur.w.transpose();

    let g = x.mode2_product_unchecked(&cur.v.transpose()).mode3_product_unchecked(&wt);
    let (u, s1) = leading_left(g.mode1_view(), ranks[0], opts);
    let u = u.to_matrix();
    let ut = u.transpose();

    let (v, s2) = if shared {
        (u.clone(), s1.clone())
    } else {
        let h = x.mode1_product_unchecked(&ut).mode3_product_unchecked(&wt);
        let (v, s2) = leading_left(h.mode2_col_mat().view(), ranks[1], opts);
        (v.to_matrix(), s2)
    };

    let p = x.mode1_product_unchecked(&ut).mode2_product_unchecked(&v.transpose());
    let (w, s3) = leading_right(p.mode3_transposed_view(), ranks[2], opts);
    let w = w.to_matrix();
    let core = p.mode3_product_unchecked(&w.transpose());
    let c = core.frobenius_norm();
    let err2 = (norm2 - c * c).max(0.0);
    Factors { u, v, w, core, err2, spectra: [s1, s2, s3] }
}
