//! Community detection on a debiased tensor.
//!
//! [`detect`] runs a semi-symmetric Tucker decomposition with ranks
//! `(K, K, min(K(K+1)/2, L))`, normalizes the rows of the shared factor
//! and clusters them with K-medians under the `ℓ_{2,1}` objective
//! `Σ_i ‖(ZW − X)_{i,:}‖`.
//!
//! The K-medians solver is heuristic: farthest-point seeding on the first
//! restart and distance-weighted seeding on the others, alternating
//! nearest-center assignment and geometric-median center updates
//! (Weiszfeld), best of several restarts. No approximation factor is
//! certified; `tau` is carried through for the caller to report.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, mismatch, Result};
use crate::linalg::{svd_leading, Matrix, SvdOptions};
use crate::math::{norm, sqrt};
use crate::model::MultiLayerNetwork;
use crate::privacy::DebiasedTensor;
use crate::rng::{self, purpose};
use crate::tensor::tucker::{tucker, TuckerOptions};
use crate::tensor::{Mode, Tensor3};

/// Rows with a smaller norm are treated as zero by [`normalize_rows`].
pub const ZERO_ROW_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    pub k: usize,
    /// Approximation slack of the K-medians step; recorded, not enforced.
    pub tau: f64,
    pub restarts: usize,
    pub seed: u64,
    pub tucker_tol: f64,
    pub tucker_max_iter: usize,
}

impl DetectOptions {
    pub fn new(k: usize) -> Self {
        DetectOptions { k, tau: 0.0, restarts: 10, seed: 0, tucker_tol: 1e-6, tucker_max_iter: 50 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone)]
pub struct DetectionResult {
    /// 0-based community of each node.
    pub labels: Vec<usize>,
    /// `n x K` membership matrix, one 1 per row.
    pub membership: Matrix,
    /// Shared mode-1/2 Tucker factor, `n x K`.
    pub embedding: Matrix,
    /// Row-normalized embedding.
    pub normalized: Matrix,
    /// Nodes whose embedding row was (numerically) zero.
    pub zero_rows: Vec<usize>,
    /// `K x K` cluster centers.
    pub centers: Matrix,
    /// `‖Z W − normalized‖_{2,1}`.
    pub objective: f64,
    pub tau: f64,
    /// Whether the Tucker iteration met its tolerance.
    pub converged: bool,
    /// Mode-3 rank requested from the decomposition.
    pub layer_rank: usize,
    /// Numerical rank of the projected layer spectrum, at most `layer_rank`.
    pub effective_layer_rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedRows {
    pub rows: Matrix,
    pub zero_rows: Vec<usize>,
}

/// Scales every row to unit norm; rows with norm below [`ZERO_ROW_NORM`]
/// are returned as zero and listed in `zero_rows`.
pub fn normalize_rows(u: &Matrix) -> NormalizedRows {
    let mut rows = u.clone();
    let mut zero_rows = Vec::new();
    for i in 0..rows.rows() {
        let r = rows.row_mut(i);
        let nrm = norm(r);
        if nrm < ZERO_ROW_NORM {
            r.iter_mut().for_each(|x| *x = 0.0);
            zero_rows.push(i);
        } else if nrm != 1.0 {
            r.iter_mut().for_each(|x| *x /= nrm);
        }
    }
    NormalizedRows { rows, zero_rows }
}

#[derive(Debug, Clone)]
pub struct KMediansResult {
    pub labels: Vec<usize>,
    /// `K x d` centers.
    pub centers: Matrix,
    pub objective: f64,
    /// Objective after seeding and after every alternation of the winning restart.
    pub history: Vec<f64>,
    /// Index of the winning restart.
    pub restart: usize,
    /// Fewer than `K` distinct points were available.
    pub degenerate: bool,
}

impl KMediansResult {
    /// `n x K` 0/1 membership matrix.
    pub fn membership(&self) -> Matrix {
        membership_matrix(&self.labels, self.centers.rows())
    }
}

fn membership_matrix(labels: &[usize], k: usize) -> Matrix {
    let mut z = Matrix::zeros(labels.len(), k);
    for (i, &c) in labels.iter().enumerate() {
        z[(i, c)] = 1.0;
    }
    z
}

#[inline]
fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    sqrt(s)
}

/// `ℓ_{2,1}` cost `Σ_i ‖x_i − w_{c_i}‖`.
pub fn l21_cost(x: &Matrix, labels: &[usize], centers: &Matrix) -> f64 {
    labels.iter().enumerate().map(|(i, &c)| dist(x.row(i), centers.row(c))).sum()
}

/// Nearest center for every row; ties go to the lower center index.
fn assign(x: &Matrix, centers: &Matrix) -> Vec<usize> {
    (0..x.rows())
        .map(|i| {
            let mut best = (0, f64::INFINITY);
            for c in 0..centers.rows() {
                let d = dist(x.row(i), centers.row(c));
                if d < best.1 {
                    best = (c, d);
                }
            }
            best.0
        })
        .collect()
}

/// Gives every empty cluster the point farthest from its current center,
/// taken from clusters that keep at least one member.
fn fill_empty_clusters(x: &Matrix, labels: &mut [usize], centers: &mut Matrix) {
    let k = centers.rows();
    loop {
        let mut sizes = vec![0usize; k];
        labels.iter().for_each(|&c| sizes[c] += 1);
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut far = None;
        let mut far_d = -1.0;
        for (i, &c) in labels.iter().enumerate() {
            if sizes[c] > 1 {
                let d = dist(x.row(i), centers.row(c));
                if d > far_d {
                    far_d = d;
                    far = Some(i);
                }
            }
        }
        let Some(i) = far else {
            return;
        };
        labels[i] = empty;
        centers.row_mut(empty).copy_from_slice(x.row(i));
    }
}

/// Geometric median of `points` by Weiszfeld iteration from `start`.
fn geometric_median(x: &Matrix, members: &[usize], start: &[f64]) -> Vec<f64> {
    // Weiszfeld with the Vardi-Zhang correction for iterates on a data point.
    let d = start.len();
    let mut y = start.to_vec();
    for _ in 0..100 {
        let mut num = vec![0.0; d];
        let mut den = 0.0;
        let mut eta = 0.0;
        for &i in members {
            let p = x.row(i);
            let r = dist(p, &y);
            if r <= 1e-12 {
                eta += 1.0;
                continue;
            }
            for (n, v) in num.iter_mut().zip(p) {
                *n += v / r;
            }
            den += 1.0 / r;
        }
        if den == 0.0 {
            break;
        }
        let t: Vec<f64> = num.iter().map(|v| v / den).collect();
        let next: Vec<f64> = if eta == 0.0 {
            t
        } else {
            let pull: Vec<f64> = num.iter().zip(&y).map(|(n, yv)| n - den * yv).collect();
            let r = norm(&pull);
            if r <= eta {
                break;
            }
            let a = eta / r;
            t.iter().zip(&y).map(|(tv, yv)| (1.0 - a) * tv + a * yv).collect()
        };
        let step = dist(&next, &y);
        y = next;
        if step <= 1e-8 * (1.0 + norm(&y)) {
            break;
        }
    }
    y
}

/// Seeds start from `first`. With `rng` absent every further seed is the
/// point farthest from the chosen ones; otherwise it is drawn with
/// probability proportional to that distance.
fn seed_centers(x: &Matrix, k: usize, first: usize, mut rng: Option<&mut ChaCha8Rng>) -> (Matrix, bool) {
    let n = x.rows();
    let mut chosen = vec![first];
    let mut mind: Vec<f64> = (0..n).map(|i| dist(x.row(i), x.row(first))).collect();
    let mut degenerate = false;
    while chosen.len() < k {
        let mut best = 0;
        for i in 1..n {
            if mind[i] > mind[best] {
                best = i;
            }
        }
        if let Some(rng) = rng.as_deref_mut() {
            let total: f64 = mind.iter().sum();
            if total > 0.0 {
                let mut target = rng.gen::<f64>() * total;
                for (i, &d) in mind.iter().enumerate() {
                    if d > 0.0 {
                        best = i;
                        if target < d {
                            break;
                        }
                        target -= d;
                    }
                }
            }
        }
        if mind[best] == 0.0 {
            degenerate = true;
            // Duplicate centers; pick the lowest index not yet used.
            best = (0..n).find(|i| !chosen.contains(i)).unwrap_or(0);
        }
        chosen.push(best);
        for i in 0..n {
            mind[i] = mind[i].min(dist(x.row(i), x.row(best)));
        }
    }
    let centers = Matrix::from_fn(k, x.cols(), |c, j| x[(chosen[c], j)]);
    (centers, degenerate)
}

fn k_medians_once(x: &Matrix, k: usize, first: usize, rng: Option<&mut ChaCha8Rng>) -> KMediansResult {
    let (mut centers, degenerate) = seed_centers(x, k, first, rng);
    let mut labels = assign(x, &centers);
    fill_empty_clusters(x, &mut labels, &mut centers);
    let mut objective = l21_cost(x, &labels, &centers);
    let mut history = vec![objective];

    for _ in 0..100 {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        labels.iter().enumerate().for_each(|(i, &c)| members[c].push(i));
        let mut next_centers = centers.clone();
        for c in 0..k {
            if members[c].is_empty() {
                continue;
            }
            let cand = geometric_median(x, &members[c], centers.row(c));
            let old_cost: f64 = members[c].iter().map(|&i| dist(x.row(i), centers.row(c))).sum();
            let new_cost: f64 = members[c].iter().map(|&i| dist(x.row(i), &cand)).sum();
            if new_cost < old_cost {
                next_centers.row_mut(c).copy_from_slice(&cand);
            }
        }
        let mut next_labels = assign(x, &next_centers);
        fill_empty_clusters(x, &mut next_labels, &mut next_centers);
        let next_obj = l21_cost(x, &next_labels, &next_centers);
        let stable = next_labels == labels && objective - next_obj <= 1e-12 * (1.0 + objective);
        centers = next_centers;
        labels = next_labels;
        objective = next_obj;
        history.push(objective);
        if stable {
            break;
        }
    }
    KMediansResult { labels, centers, objective, history, restart: 0, degenerate }
}

/// Best of `restarts` K-medians runs on the rows of `x`. Ties in the
/// objective go to the lowest restart index.
pub fn k_medians(x: &Matrix, k: usize, restarts: usize, seed: u64) -> Result<KMediansResult> {
    let n = x.rows();
    if k == 0 || n < k {
        return Err(invalid(format_args!("K-medians needs 1 <= K <= n, got K={k} n={n}")));
    }
    if restarts == 0 {
        return Err(invalid("at least one restart is required"));
    }
    if !x.is_finite() {
        return Err(crate::error::Error::NonFinite("points"));
    }
    let mut best: Option<KMediansResult> = None;
    for r in 0..restarts {
        let mut rng = rng::stream(seed, &[purpose::KMEDIANS, r as u64]);
        let first = rng.gen_range(0..n);
        let weighted = if r == 0 { None } else { Some(&mut rng) };
        let mut run = k_medians_once(x, k, first, weighted);
        run.restart = r;
        if best.as_ref().map_or(true, |b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Community detection on a debiased tensor.
pub fn detect(t: &DebiasedTensor, opts: &DetectOptions) -> Result<DetectionResult> {
    detect_tensor(t.values(), opts)
}

/// [`detect`] on any `n x n x L` tensor (e.g. a noiseless expectation).
pub fn detect_tensor(t: &Tensor3, opts: &DetectOptions) -> Result<DetectionResult> {
    let [n, n2, layers] = t.dims();
    if n != n2 {
        return Err(mismatch("an n x n x L tensor", format_args!("{:?}", t.dims())));
    }
    if n == 0 || layers == 0 {
        return Err(invalid("the tensor is empty"));
    }
    let k = opts.k;
    if k == 0 || k > n {
        return Err(invalid(format_args!("need 1 <= K <= n, got K={k} n={n}")));
    }
    if !(opts.tau >= 0.0 && opts.tau.is_finite()) {
        return Err(invalid(format_args!("tau must be nonnegative, got {}", opts.tau)));
    }

    let layer_rank = (k * (k + 1) / 2).min(layers);
    let tucker_opts = TuckerOptions {
        tol: opts.tucker_tol,
        max_iter: opts.tucker_max_iter,
        shared_mode12: true,
    };
    let factors = tucker(t, [k, k, layer_rank], tucker_opts)?;
    let s3 = &factors.spectra[2];
    let top = s3.first().copied().unwrap_or(0.0);
    let effective_layer_rank =
        s3.iter().take(layer_rank).filter(|&&s| top > 0.0 && s > 1e-10 * top).count();

    let embedding = factors.u;
    let NormalizedRows { rows: normalized, zero_rows } = normalize_rows(&embedding);

    let active: Vec<usize> = if n - zero_rows.len() >= k {
        (0..n).filter(|i| zero_rows.binary_search(i).is_err()).collect()
    } else {
        (0..n).collect()
    };
    let xa = Matrix::from_fn(active.len(), k, |a, j| normalized[(active[a], j)]);
    let km = k_medians(&xa, k, opts.restarts, opts.seed)?;
    let centers = km.centers;
    let labels = assign(&normalized, &centers);
    let objective = l21_cost(&normalized, &labels, &centers);

    Ok(DetectionResult {
        membership: membership_matrix(&labels, k),
        labels,
        embedding,
        normalized,
        zero_rows,
        centers,
        objective,
        tau: opts.tau,
        converged: factors.converged,
        layer_rank,
        effective_layer_rank,
    })
}

/// Scree data for choosing `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreeReport {
    pub kappa: usize,
    /// Leading singular values of the mode-1 matricization of the network
    /// projected on its mode-3 Tucker factor.
    pub singular_values: Vec<f64>,
    /// `argmax_{1 <= k < κ} σ_k / σ_{k+1}`.
    pub suggested_k: usize,
}

/// Elbow-based estimate of the number of communities.
pub fn estimate_k(net: &MultiLayerNetwork, kappa: usize) -> Result<ScreeReport> {
    estimate_k_tensor(net.adjacency(), kappa)
}

/// [`estimate_k`] on any semi-symmetric `n x n x L` tensor.
pub fn estimate_k_tensor(t: &Tensor3, kappa: usize) -> Result<ScreeReport> {
    let [n, n2, layers] = t.dims();
    if n != n2 {
        return Err(mismatch("an n x n x L tensor", format_args!("{:?}", t.dims())));
    }
    if kappa < 2 || kappa > n {
        return Err(invalid(format_args!("need 2 <= kappa <= n, got kappa={kappa} n={n}")));
    }
    let factors = tucker(t, [kappa, kappa, layers], TuckerOptions::shared())?;
    let projected = t.mode_product(&factors.w.transpose(), Mode::Three)?;
    let count = (2 * kappa).min(n);
    let svd = svd_leading(projected.mode1_view(), count, SvdOptions::STRICT);
    let sv = svd.s;

    let tiny = 1e-12 * sv[0];
    let mut suggested = 1;
    let mut best_ratio = 0.0f64;
    for kk in 1..kappa.min(sv.len()) {
        let (a, b) = (sv[kk - 1], sv[kk]);
        let ratio = if b <= tiny {
            if a > tiny {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            a / b
        };
        if ratio > best_ratio {
            best_ratio = ratio;
            suggested = kk;
        }
    }
    Ok(ScreeReport { kappa, singular_values: sv, suggested_k: suggested })
}
