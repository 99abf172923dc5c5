use flipnet_core::{corollary_regime_check, generate_params, DcMsbmParams, PrivacyProfile, Scenario};

fn max_core(p: &DcMsbmParams) -> f64 {
    p.effective_core().as_slice().iter().copied().fold(0.0, f64::max)
}

// ⌊2 n^a⌋ nodes at sqrt(ln n / (n L)), everyone else at 1.
fn polarized(n: usize, layers: usize, a: f64) -> PrivacyProfile {
    let m = (2.0 * (n as f64).powf(a)).floor() as usize;
    let low = ((n as f64).ln() / (n * layers) as f64).sqrt();
    PrivacyProfile::new((0..n).map(|i| if i < m { low } else { 1.0 }).collect()).unwrap()
}

#[test]
fn polarized_terms_match_closed_form() {
    for (n, a) in [(500, 0.1), (500, 0.7), (1000, 0.3), (1000, 0.7)] {
        let params = generate_params(n, 4, 4, n as u64).unwrap();
        let r = corollary_regime_check(&polarized(n, 4, a), &params, Scenario::Polarized).unwrap();
        let nf = n as f64;
        let beta = (2.0 * nf.powf(a)).floor() / nf;
        let alpha2 = nf.ln() / (nf * 4.0);
        let s = max_core(&params);
        assert!((r.lhs - beta / (alpha2 * (1.0 - beta))).abs() <= 1e-9 * r.lhs, "{n} {a}");
        assert!((r.rhs - nf * 4.0 * s * s / nf.ln()).abs() <= 1e-9 * r.rhs);
        assert!((r.spread - beta).abs() < 1e-15);
        assert_eq!(r.holds, r.lhs < r.rhs);
    }
}

#[test]
fn more_private_nodes_move_away_from_the_regime() {
    for n in [500, 1000] {
        let params = generate_params(n, 4, 4, 7).unwrap();
        let lhs: Vec<f64> = [0.1, 0.3, 0.5, 0.7]
            .iter()
            .map(|&a| corollary_regime_check(&polarized(n, 4, a), &params, Scenario::Polarized).unwrap().lhs)
            .collect();
        assert!(lhs.windows(2).all(|w| w[0] < w[1]), "{lhs:?}");
    }
}

#[test]
fn uniform_terms_and_edge_cases() {
    let params = generate_params(200, 2, 8, 3).unwrap();
    let f: Vec<f64> = (0..200).map(|i| 0.6 + 0.002 * i as f64).collect();
    let r = corollary_regime_check(&PrivacyProfile::new(f).unwrap(), &params, Scenario::Uniform).unwrap();
    let s = max_core(&params);
    assert!((r.lhs - 0.6f64.powi(4)).abs() < 1e-12);
    assert!((r.rhs - 200f64.ln() / (200.0 * 8.0 * s * s)).abs() < 1e-12 * r.rhs);
    assert!((r.spread - 0.998 / 0.6).abs() < 1e-12);

    let open = PrivacyProfile::constant(200, 1.0).unwrap();
    let r = corollary_regime_check(&open, &params, Scenario::Polarized).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert!(r.holds);

    let short = PrivacyProfile::constant(10, 1.0).unwrap();
    assert!(corollary_regime_check(&short, &params, Scenario::Uniform).is_err());
}
