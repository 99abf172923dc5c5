mod common;

use common::*;
use flipnet_core::{
    debias, flip_network, preference_from_budgets, privacy_budget, rescale_debias, sample_network,
    FlipMatrix, MultiLayerNetwork, PrivacyProfile, Tensor3,
};
use rand::Rng;

fn constant_network(layers: usize, value: f64) -> MultiLayerNetwork {
    MultiLayerNetwork::new(Tensor3::from_fn([1, 1, layers], |_, _, _| value)).unwrap()
}

fn ones_fraction(net: &MultiLayerNetwork) -> f64 {
    let s = net.adjacency().as_slice();
    s.iter().sum::<f64>() / s.len() as f64
}

#[test]
fn flip_likelihood_ratio_matches_theta_odds() {
    let theta = FlipMatrix::uniform(1, 0.75).unwrap();
    let half = 500_000;
    let p1 = ones_fraction(&flip_network(&constant_network(half, 1.0), &theta, 1).unwrap());
    let p0 = ones_fraction(&flip_network(&constant_network(half, 0.0), &theta, 2).unwrap());
    let ratio = p1 / p0;
    assert!((2.85..=3.15).contains(&ratio), "{ratio}");
    assert!(((1.0 - p0) / (1.0 - p1) - 3.0).abs() < 0.15);
}

#[test]
fn half_theta_output_is_a_fair_coin() {
    let theta = FlipMatrix::uniform(1, 0.5).unwrap();
    let r = 100_000;
    for input in [0.0, 1.0] {
        let p = ones_fraction(&flip_network(&constant_network(r, input), &theta, 3).unwrap());
        assert!((p - 0.5).abs() <= 4.0 * (0.25 / r as f64).sqrt(), "{p}");
    }
}

/// Entry (1,2) across `reps` layers: sample from P = 0.5, flip with
/// f = (0.8, 0.8), debias. Returns the debiased and rescaled samples.
fn debias_samples(reps: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let prob = Tensor3::from_fn([2, 2, reps], |_, _, _| 0.5);
    let net = sample_network(&prob, seed).unwrap();
    let profile = PrivacyProfile::constant(2, 0.8).unwrap();
    let flipped = flip_network(&net, &flipnet_core::flip_matrix(&profile), seed + 1).unwrap();
    let d = debias(&flipped, &profile).unwrap();
    let r = rescale_debias(&d).unwrap();
    let a = (0..reps).map(|l| d.values().get(0, 1, l)).collect();
    let b = (0..reps).map(|l| r.get(0, 1, l)).collect();
    (a, b)
}

fn mean_and_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn debiased_entry_is_unbiased() {
    let (a, b) = debias_samples(100_000, 8);
    let (m, se) = mean_and_se(&a);
    assert!((m - 0.32).abs() <= 4.0 * se, "{m} ± {se}");
    let (m, se) = mean_and_se(&b);
    assert!((m - 0.5).abs() <= 4.0 * se, "{m} ± {se}");
}

#[test]
fn sampling_frequency_matches_probability() {
    let reps = 100_000;
    let p = 0.3;
    let net = sample_network(&Tensor3::from_fn([1, 1, reps], |_, _, _| p), 4).unwrap();
    let freq = ones_fraction(&net);
    assert!((freq - p).abs() < 4.0 * (p * (1.0 - p) / reps as f64).sqrt());
}

#[test]
fn budgets_invert_to_preferences() {
    let mut g = rng(6);
    for _ in 0..1000 {
        let n = g.gen_range(3..8);
        let f: Vec<f64> = (0..n).map(|_| g.gen_range(0.01..0.999)).collect();
        let eps = privacy_budget(&PrivacyProfile::new(f.clone()).unwrap());
        for i in 0..n {
            let (ip, j) = ((i + 1) % n, (i + 2) % n);
            let got = preference_from_budgets(eps.get(i, ip), eps.get(i, j), eps.get(ip, j)).unwrap();
            assert!((got - f[i]).abs() <= 1e-10, "{got} vs {}", f[i]);
        }
    }
}
