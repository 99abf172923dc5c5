//! Scoring and theory diagnostics.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, mismatch, Result};
use crate::linalg::truncated_svd;
use crate::math::{ln, powf, sqrt};
use crate::model::DcMsbmParams;
use crate::privacy::PrivacyProfile;
use crate::tensor::Mode;

/// Minimum over label permutations of the fraction of nodes whose labels
/// disagree. Labels are 0-based and must be `< k`.
pub fn hamming_error(c_hat: &[usize], c_star: &[usize], k: usize) -> Result<f64> {
    let n = c_hat.len();
    if c_star.len() != n {
        return Err(mismatch(format_args!("{n} reference labels"), c_star.len()));
    }
    if n == 0 {
        return Err(invalid("cannot score an empty labelling"));
    }
    if let Some(&bad) = c_hat.iter().chain(c_star).find(|&&c| c >= k) {
        return Err(invalid(format_args!("label {} outside 1..={k}", bad + 1)));
    }
    let agree = best_agreement(c_hat, c_star, k).0;
    Ok((n - agree) as f64 / n as f64)
}

/// `k x k` confusion counts, `[estimated][reference]`.
pub fn confusion(c_hat: &[usize], c_star: &[usize], k: usize) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; k]; k];
    for (&a, &b) in c_hat.iter().zip(c_star) {
        c[a][b] += 1;
    }
    c
}

/// Largest number of agreeing nodes over label permutations, and the
/// permutation (`perm[estimated] = reference`) achieving it.
pub fn best_agreement(c_hat: &[usize], c_star: &[usize], k: usize) -> (usize, Vec<usize>) {
    let conf = confusion(c_hat, c_star, k);
    let cost: Vec<Vec<i64>> = conf.iter().map(|r| r.iter().map(|&x| -x).collect()).collect();
    let perm = min_cost_assignment(&cost);
    let agree: i64 = perm.iter().enumerate().map(|(a, &b)| conf[a][b]).sum();
    (agree as usize, perm)
}

/// Hungarian algorithm (shortest augmenting paths with potentials) on a
/// square integer cost matrix. Returns `assignment[row] = column`.
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    const INF: i64 = i64::MAX / 4;
    // 1-based internals, column 0 is a sentinel.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] != 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Thresholds used to turn the rate conditions into yes/no flags. The
/// conditions are asymptotic, so the flags are only indicative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticConstants {
    /// `n_max / n_min` at most this.
    pub size_ratio: f64,
    /// `γ_max / γ_min` at most this.
    pub gamma_ratio: f64,
    /// `(f_i d_i)² <= c1 · γ_{c_i} / n_{c_i}` for every node.
    pub c1: f64,
    /// `s_n >= margin · sqrt(φ_n log n / (nL)) / ψ̄`.
    pub sparsity_margin: f64,
    /// `σ_min(M3(B)) >= signal · sqrt(L) · s_n`.
    pub signal: f64,
}

impl Default for DiagnosticConstants {
    fn default() -> Self {
        DiagnosticConstants { size_ratio: 4.0, gamma_ratio: 4.0, c1: 4.0, sparsity_margin: 1.0, signal: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub n: usize,
    pub layers: usize,
    pub k: usize,
    pub community_sizes: Vec<usize>,
    /// Effective community sizes `γ_k = Σ_{c_i = k} (f_i d_i)²`.
    pub gamma: Vec<f64>,
    /// `ψ̄ = n⁻¹ Σ (f_i d_i)²`
    pub psi_bar: f64,
    /// `φ_n = 1 − min f_i + 4 s_n`
    pub phi_n: f64,
    pub s_n: f64,
    /// `v_k = n_k⁻² Σ_{c_i = k} γ_k / (f_i d_i)²`; `inf` when some `f_i d_i = 0`.
    pub v: Vec<f64>,
    pub v_infinite: bool,
    /// `(Σ v_k)^{1/2} sqrt(φ_n log n) / (sqrt(nL) s_n ψ̄)`, constants omitted.
    pub bound: f64,
    /// Smallest nonzero singular value of the mode-3 matricization of the core.
    pub sigma_min_b: f64,
    /// Assumptions 1 to 4 at the given constants.
    pub assumption_flags: [bool; 4],
}

fn sparsity_level(params: &DcMsbmParams) -> f64 {
    params.sparsity().unwrap_or_else(|| {
        params.core().as_slice().iter().copied().fold(0.0, f64::max)
    })
}

pub fn diagnostics(
    params: &DcMsbmParams,
    profile: &PrivacyProfile,
    constants: &DiagnosticConstants,
) -> Result<DiagnosticsReport> {
    let (n, k, layers) = (params.n(), params.k(), params.layers());
    if profile.n() != n {
        return Err(mismatch(format_args!("{n} preferences"), profile.n()));
    }
    let f = profile.values();
    let d = params.degrees();
    let labels = params.labels();
    let sizes = params.community_sizes();

    let w2: Vec<f64> = (0..n).map(|i| (f[i] * d[i]) * (f[i] * d[i])).collect();
    let mut gamma = vec![0.0; k];
    for i in 0..n {
        gamma[labels[i]] += w2[i];
    }
    let psi_bar = w2.iter().sum::<f64>() / n as f64;
    let s_n = sparsity_level(params);
    let phi_n = 1.0 - profile.min() + 4.0 * s_n;

    let mut v = vec![0.0; k];
    let mut v_infinite = false;
    for i in 0..n {
        let c = labels[i];
        if w2[i] == 0.0 {
            v[c] = f64::INFINITY;
            v_infinite = true;
        } else {
            v[c] += gamma[c] / w2[i];
        }
    }
    for c in 0..k {
        let nk = sizes[c] as f64;
        v[c] /= nk * nk;
    }
    let nf = n as f64;
    let bound =
        sqrt(v.iter().sum::<f64>()) * sqrt(phi_n * ln(nf)) / (sqrt(nf * layers as f64) * s_n * psi_bar);

    let m3 = params.effective_core().matricize(Mode::Three);
    let r = m3.rows().min(m3.cols());
    let sv = truncated_svd(&m3, r)?.singular_values;
    let top = sv.first().copied().unwrap_or(0.0);
    let sigma_min_b =
        sv.iter().copied().filter(|&s| s > 1e-10 * top).fold(f64::INFINITY, f64::min);
    let sigma_min_b = if sigma_min_b.is_finite() { sigma_min_b } else { 0.0 };

    let n_max = *sizes.iter().max().unwrap_or(&0) as f64;
    let n_min = *sizes.iter().min().unwrap_or(&0) as f64;
    let g_max = gamma.iter().copied().fold(0.0, f64::max);
    let g_min = gamma.iter().copied().fold(f64::INFINITY, f64::min);
    let a1 = n_max <= constants.size_ratio * n_min;
    let a2 = g_max <= constants.gamma_ratio * g_min
        && (0..n).all(|i| {
            let c = labels[i];
            w2[i] <= constants.c1 * gamma[c] / sizes[c] as f64
        });
    let a3 = psi_bar > 0.0
        && s_n >= constants.sparsity_margin * sqrt(phi_n * ln(nf) / (nf * layers as f64)) / psi_bar;
    let a4 = sigma_min_b >= constants.signal * sqrt(layers as f64) * s_n;

    Ok(DiagnosticsReport {
        n,
        layers,
        k,
        community_sizes: sizes,
        gamma,
        psi_bar,
        phi_n,
        s_n,
        v,
        v_infinite,
        bound,
        sigma_min_b,
        assumption_flags: [a1, a2, a3, a4],
    })
}

/// Which privacy regime to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Preferences of comparable size everywhere.
    Uniform,
    /// A subset `S` of nodes with small preferences, the rest near one.
    Polarized,
}

/// Nodes with a preference below this form the private set `S` of the
/// polarized scenario.
pub const POLARIZED_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub scenario: Scenario,
    /// Uniform: `min f⁴`. Polarized: `β / (α² (1 − β))`.
    pub lhs: f64,
    /// Uniform: `log n / (n L s_n²)`. Polarized: `n L s_n² / log n`.
    pub rhs: f64,
    /// Uniform: `lhs > rhs`. Polarized: `lhs < rhs`.
    pub holds: bool,
    /// Uniform: `max f / min f`. Polarized: `β = |S| / n`.
    pub spread: f64,
    /// Polarized only: `α`, the smallest preference in `S` (`NaN` if `S` is empty).
    pub alpha: f64,
}

/// Evaluates the finite-sample proxy of the consistency condition for the
/// given scenario.
pub fn corollary_regime_check(
    profile: &PrivacyProfile,
    params: &DcMsbmParams,
    scenario: Scenario,
) -> Result<RegimeReport> {
    let n = params.n();
    if profile.n() != n {
        return Err(mismatch(format_args!("{n} preferences"), profile.n()));
    }
    let nf = n as f64;
    let s_n = sparsity_level(params);
    let nls2 = nf * params.layers() as f64 * s_n * s_n;
    let f = profile.values();
    Ok(match scenario {
        Scenario::Uniform => {
            let fmin = profile.min();
            let fmax = f.iter().copied().fold(0.0, f64::max);
            let lhs = powf(fmin, 4.0);
            let rhs = ln(nf) / nls2;
            RegimeReport {
                scenario,
                lhs,
                rhs,
                holds: lhs > rhs,
                spread: if fmin > 0.0 { fmax / fmin } else { f64::INFINITY },
                alpha: f64::NAN,
            }
        }
        Scenario::Polarized => {
            let private: Vec<f64> = f.iter().copied().filter(|&x| x < POLARIZED_THRESHOLD).collect();
            let beta = private.len() as f64 / nf;
            let alpha = private.iter().copied().fold(f64::NAN, f64::min);
            let lhs = if private.is_empty() {
                0.0
            } else if alpha == 0.0 || beta >= 1.0 {
                f64::INFINITY
            } else {
                beta / (alpha * alpha * (1.0 - beta))
            };
            let rhs = nls2 / ln(nf);
            RegimeReport { scenario, lhs, rhs, holds: lhs < rhs, spread: beta, alpha }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor3;

    #[test]
    fn hamming_examples() {
        let truth = [0, 0, 1, 1];
        assert_eq!(hamming_error(&truth, &truth, 2).unwrap(), 0.0);
        assert_eq!(hamming_error(&[1, 1, 0, 0], &truth, 2).unwrap(), 0.0);
        assert_eq!(hamming_error(&[0, 1, 1, 1], &truth, 2).unwrap(), 0.25);
    }

    #[test]
    fn hamming_errors() {
        assert!(hamming_error(&[0, 1], &[0], 2).is_err());
        assert!(hamming_error(&[0, 2], &[0, 1], 2).is_err());
        assert!(hamming_error(&[], &[], 2).is_err());
    }

    #[test]
    fn assignment_small_case() {
        let cost = vec![vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]];
        let a = min_cost_assignment(&cost);
        let total: i64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5);
    }

    fn unit_params(n: usize, k: usize, layers: usize) -> DcMsbmParams {
        let core = Tensor3::from_fn([k, k, layers], |a, b, _| if a == b { 0.6 } else { 0.2 });
        let labels = (0..n).map(|i| i % k).collect();
        DcMsbmParams::new(labels, vec![1.0; n], core, None).unwrap()
    }

    #[test]
    fn diagnostics_with_unit_parameters() {
        let (n, k) = (60, 3);
        let p = unit_params(n, k, 4);
        let f = PrivacyProfile::constant(n, 1.0).unwrap();
        let r = diagnostics(&p, &f, &DiagnosticConstants::default()).unwrap();
        for g in &r.gamma {
            assert!((g - 20.0).abs() < 1e-12);
        }
        assert!((r.psi_bar - 1.0).abs() < 1e-15);
        for v in &r.v {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert_eq!(r.s_n, 0.6);
        assert!((r.phi_n - 4.0 * r.s_n).abs() < 1e-15);
        let total: f64 = r.gamma.iter().sum();
        assert!((total - n as f64 * r.psi_bar).abs() < 1e-10);
        assert!(r.bound.is_finite() && r.bound > 0.0);
    }

    #[test]
    fn zero_preference_gives_infinite_v() {
        let p = unit_params(6, 2, 2);
        let mut f = vec![1.0; 6];
        f[0] = 0.0;
        let r = diagnostics(&p, &PrivacyProfile::new(f).unwrap(), &DiagnosticConstants::default()).unwrap();
        assert!(r.v_infinite);
        assert_eq!(r.v[0], f64::INFINITY);
        assert_eq!(r.bound, f64::INFINITY);
    }

    #[test]
    fn uniform_scenario_substitution() {
        // f ≡ 0.9, n = 400, L = 8, s_n = 0.5 (supplied).
        let core = Tensor3::from_fn([2, 2, 8], |a, b, _| if a == b { 1.0 } else { 0.5 });
        let labels = (0..400).map(|i| i % 2).collect();
        let p = DcMsbmParams::new(labels, vec![1.0; 400], core, Some(0.5)).unwrap();
        let f = PrivacyProfile::constant(400, 0.9).unwrap();
        let r = corollary_regime_check(&f, &p, Scenario::Uniform).unwrap();
        assert!((r.lhs - 0.6561).abs() < 1e-12);
        let expected_rhs = 400f64.ln() / (400.0 * 8.0 * 0.25);
        assert!((r.rhs - expected_rhs).abs() < 1e-15);
        assert!(r.holds);
        assert_eq!(r.spread, 1.0);
    }

    #[test]
    fn polarized_with_no_private_nodes_passes() {
        let p = unit_params(50, 2, 2);
        let f = PrivacyProfile::constant(50, 0.98).unwrap();
        let r = corollary_regime_check(&f, &p, Scenario::Polarized).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.spread, 0.0);
        assert!(r.holds);
    }
}
