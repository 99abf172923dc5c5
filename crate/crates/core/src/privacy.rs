//! Personalized edge flipping and its debiasing.
//!
//! Every node `i` carries a preference `f_i ∈ [0, 1]`. The edge slot
//! `(i, j, l)` is released unchanged with probability
//! `θ_ij = (1 + f_i f_j) / 2` and flipped otherwise, which gives the slot a
//! local privacy budget `ε_ij = log((1 + f_i f_j) / (1 − f_i f_j))`.
//! Adding `(f_i f_j − 1) / 2` to the released value makes its expectation
//! `f_i f_j · P(i, j, l)`, so the community structure of `P` survives.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::Matrix;
use crate::math::{exp, ln_1p, sqrt, tanh};
use crate::model::{probability_tensor, DcMsbmParams, MultiLayerNetwork};
use crate::rng::{self, purpose};
use crate::tensor::Tensor3;

/// Node privacy preferences `f`; 0 asks for pure coin flips, 1 waives privacy.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyProfile {
    f: Vec<f64>,
}

impl PrivacyProfile {
    pub fn new(f: Vec<f64>) -> Result<Self> {
        if let Some(i) = f.iter().position(|x| !(0.0..=1.0).contains(x)) {
            return Err(invalid(format_args!(
                "preference of node {} is {}, outside [0, 1]",
                i + 1,
                f[i]
            )));
        }
        Ok(PrivacyProfile { f })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        PrivacyProfile::new(alloc::vec![value; n])
    }

    /// The constant profile whose every edge budget equals `eps`:
    /// `f = sqrt((e^ε − 1) / (e^ε + 1))`.
    pub fn from_uniform_epsilon(n: usize, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(invalid(format_args!("epsilon must be nonnegative, got {eps}")));
        }
        PrivacyProfile::constant(n, sqrt(tanh(0.5 * eps)))
    }

    /// `count` randomly chosen nodes get `low`, everybody else `high`.
    pub fn polarized(n: usize, count: usize, low: f64, high: f64, seed: u64) -> Result<Self> {
        if count > n {
            return Err(invalid(format_args!("cannot pick {count} of {n} nodes")));
        }
        let mut f = alloc::vec![high; n];
        for i in choose_subset(n, count, seed) {
            f[i] = low;
        }
        PrivacyProfile::new(f)
    }

    pub fn n(&self) -> usize {
        self.f.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.f[i]
    }

    pub fn min(&self) -> f64 {
        self.f.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `count` distinct indices from `0..n`, chosen uniformly (partial
/// Fisher-Yates), returned sorted.
pub fn choose_subset(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng::stream(seed, &[purpose::PROFILE, n as u64, count as u64]);
    let mut idx: Vec<usize> = (0..n).collect();
    for k in 0..count.min(n) {
        let j = rng.gen_range(k..n);
        idx.swap(k, j);
    }
    idx.truncate(count.min(n));
    idx.sort_unstable();
    idx
}

/// Keep-probabilities `θ = (f fᵀ + 1 1ᵀ) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipMatrix {
    theta: Matrix,
}

impl FlipMatrix {
    /// A flip matrix with the same keep-probability everywhere.
    pub fn uniform(n: usize, theta: f64) -> Result<Self> {
        FlipMatrix::from_matrix(Matrix::from_fn(n, n, |_, _| theta))
    }

    /// Accepts any symmetric matrix with entries in `[1/2, 1]`.
    pub fn from_matrix(theta: Matrix) -> Result<Self> {
        let n = theta.rows();
        if theta.cols() != n {
            return Err(mismatch("a square matrix", format_args!("{}x{}", n, theta.cols())));
        }
        if theta.as_slice().iter().any(|t| !(0.5..=1.0).contains(t)) {
            return Err(invalid("keep-probabilities must lie in [1/2, 1]"));
        }
        if theta.max_abs_diff(&theta.transpose()) != 0.0 {
            return Err(invalid("the flip matrix must be symmetric"));
        }
        Ok(FlipMatrix { theta })
    }

    pub fn n(&self) -> usize {
        self.theta.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.theta[(i, j)]
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.theta
    }
}

pub fn flip_matrix(profile: &PrivacyProfile) -> FlipMatrix {
    let f = profile.values();
    FlipMatrix { theta: Matrix::from_fn(f.len(), f.len(), |i, j| 0.5 * (f[i] * f[j] + 1.0)) }
}

/// Keep-probability of the uniform flipping mechanism with budget `eps`:
/// `e^ε / (1 + e^ε)`.
pub fn uniform_theta(eps: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(invalid(format_args!("epsilon must be nonnegative, got {eps}")));
    }
    Ok(1.0 / (1.0 + exp(-eps)))
}

/// Releases every slot `(i, j, l)`, `i <= j`, unchanged with probability
/// `θ_ij` and flipped otherwise; the mirror slot `(j, i, l)` receives the
/// same value. Layers are flipped independently.
pub fn flip_network(net: &MultiLayerNetwork, theta: &FlipMatrix, seed: u64) -> Result<MultiLayerNetwork> {
    let n = net.n();
    if theta.n() != n {
        return Err(mismatch(format_args!("flip matrix of order {n}"), theta.n()));
    }
    let mut out = net.clone();
    for l in 0..net.layers() {
        for i in 0..n {
            let mut rng = rng::stream(seed, &[purpose::FLIP, l as u64, i as u64]);
            for j in i..n {
                let keep = rng.gen::<f64>() < theta.get(i, j);
                if !keep {
                    out.set_edge(i, j, l, !net.has_edge(i, j, l));
                }
            }
        }
    }
    Ok(out)
}

/// Per-edge budgets `ε_ij = log((1 + f_i f_j) / (1 − f_i f_j))`, with
/// `f64::INFINITY` when `f_i f_j = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetMatrix {
    eps: Matrix,
}

impl BudgetMatrix {
    pub fn n(&self) -> usize {
        self.eps.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.eps[(i, j)]
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.eps
    }

    /// The largest budget, i.e. the uniform edge-LDP level this profile implies.
    pub fn max(&self) -> f64 {
        self.eps.as_slice().iter().copied().fold(0.0, f64::max)
    }
}

/// `ε` for a single product `x = f_i f_j`.
#[inline]
pub fn budget_for_product(x: f64) -> f64 {
    if x >= 1.0 {
        f64::INFINITY
    } else {
        // log(1 + x) − log(1 − x), accurate for small x.
        ln_1p(x) - ln_1p(-x)
    }
}

pub fn privacy_budget(profile: &PrivacyProfile) -> BudgetMatrix {
    let f = profile.values();
    BudgetMatrix {
        eps: Matrix::from_fn(f.len(), f.len(), |i, j| budget_for_product(f[i] * f[j])),
    }
}

/// Recovers `f_i` from the budgets of the triangle `(i, i')`, `(i, j)`,
/// `(i', j)`:
///
/// `f_i = sqrt( (1 − 2/(1+e^{ε_ii'})) (1 − 2/(1+e^{ε_ij})) / (1 − 2/(1+e^{ε_i'j})) )`.
///
/// Each factor `1 − 2/(1+e^ε)` is evaluated as `tanh(ε/2)`, which is the
/// same quantity without cancellation for small `ε`.
pub fn preference_from_budgets(eps_i_ip: f64, eps_i_j: f64, eps_ip_j: f64) -> Result<f64> {
    for e in [eps_i_ip, eps_i_j, eps_ip_j] {
        if !(e >= 0.0) {
            return Err(invalid(format_args!("budgets must be nonnegative, got {e}")));
        }
    }
    let t = |e: f64| tanh(0.5 * e);
    let denom = t(eps_ip_j);
    if denom == 0.0 {
        return Err(Error::UndefinedPreference);
    }
    Ok(sqrt(t(eps_i_ip) * t(eps_i_j) / denom))
}

/// The flipped tensor shifted by `(f_i f_j − 1) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DebiasedTensor {
    values: Tensor3,
    profile: PrivacyProfile,
}

impl DebiasedTensor {
    pub fn values(&self) -> &Tensor3 {
        &self.values
    }

    pub fn profile(&self) -> &PrivacyProfile {
        &self.profile
    }

    pub fn into_values(self) -> Tensor3 {
        self.values
    }
}

pub fn debias(flipped: &MultiLayerNetwork, profile: &PrivacyProfile) -> Result<DebiasedTensor> {
    let n = flipped.n();
    if profile.n() != n {
        return Err(mismatch(format_args!("{n} preferences"), profile.n()));
    }
    let f = profile.values();
    let mut values = flipped.adjacency().clone();
    for l in 0..flipped.layers() {
        let slab = values.layer_mut(l);
        for j in 0..n {
            let col = &mut slab[j * n..(j + 1) * n];
            for (i, x) in col.iter_mut().enumerate() {
                *x += 0.5 * (f[i] * f[j] - 1.0);
            }
        }
    }
    Ok(DebiasedTensor { values, profile: profile.clone() })
}

/// Divides every entry by `f_i f_j`, giving a tensor whose expectation is
/// the model's probability tensor. Entries are not clipped.
pub fn rescale_debias(t: &DebiasedTensor) -> Result<Tensor3> {
    let f = t.profile.values();
    if let Some(node) = f.iter().position(|&x| x == 0.0) {
        return Err(Error::NotRescalable { node });
    }
    let n = f.len();
    let mut out = t.values.clone();
    for l in 0..out.dims()[2] {
        let slab = out.layer_mut(l);
        for j in 0..n {
            let col = &mut slab[j * n..(j + 1) * n];
            for (i, x) in col.iter_mut().enumerate() {
                *x /= f[i] * f[j];
            }
        }
    }
    Ok(out)
}

/// The noiseless debiased tensor `f_i f_j · P(i, j, l)`.
pub fn debiased_expectation(params: &DcMsbmParams, profile: &PrivacyProfile) -> Result<Tensor3> {
    if profile.n() != params.n() {
        return Err(mismatch(format_args!("{} preferences", params.n()), profile.n()));
    }
    let f = profile.values();
    let mut p = probability_tensor(params)?;
    let n = f.len();
    for l in 0..params.layers() {
        let slab = p.layer_mut(l);
        for j in 0..n {
            for i in 0..n {
                slab[j * n + i] *= f[i] * f[j];
            }
        }
    }
    Ok(p)
}
