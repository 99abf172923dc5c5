mod common;

use common::*;
use flipnet_core::hamming_error;
use rand::Rng;

fn brute_force(c_hat: &[usize], c_star: &[usize], k: usize) -> f64 {
    let n = c_hat.len();
    permutations(k)
        .iter()
        .map(|p| c_hat.iter().zip(c_star).filter(|(a, b)| p[**a] != **b).count())
        .min()
        .unwrap() as f64
        / n as f64
}

#[test]
fn matching_equals_brute_force() {
    let mut g = rng(5);
    for _ in 0..1000 {
        let k = g.gen_range(1..=5);
        let n = g.gen_range(1..=50);
        let a: Vec<usize> = (0..n).map(|_| g.gen_range(0..k)).collect();
        let b: Vec<usize> = (0..n).map(|_| g.gen_range(0..k)).collect();
        let h = hamming_error(&a, &b, k).unwrap();
        assert_eq!(h, brute_force(&a, &b, k));
        assert_eq!(h, hamming_error(&b, &a, k).unwrap());
        assert!((0.0..=1.0).contains(&h));

        let perms = permutations(k);
        let p = &perms[g.gen_range(0..perms.len())];
        let relabelled: Vec<usize> = a.iter().map(|&c| p[c]).collect();
        assert_eq!(hamming_error(&relabelled, &b, k).unwrap(), h);
    }
}
