//! Acceptance criteria, run serially without the test harness so the
//! wall-clock limits are measured without other tests competing for the CPU
//! and every result line is printed.
//!
//! Prints one `criterion N [PASS|FAIL]` line per criterion and exits non-zero
//! if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use flipnet::experiments::{
    run_example1, run_example3, run_custom, run_flip_sweep, spearman, sweep_network, ExperimentConfig,
    ExperimentId, ExperimentResult,
};
use flipnet_core::{
    debias, debiased_expectation, detect_tensor, flip_matrix, flip_network, generate_params,
    hamming_error, preference_from_budgets, privacy_budget, probability_tensor, sample_network,
    tucker, uniform_theta, DcMsbmParams, DetectOptions, FlipMatrix, Matrix, Mode, MultiLayerNetwork,
    PrivacyProfile, Tensor3, TuckerOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn gen(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn ones_fraction(net: &MultiLayerNetwork) -> f64 {
    let s = net.adjacency().as_slice();
    s.iter().sum::<f64>() / s.len() as f64
}

// 1. Likelihood ratio of the flip kernel at θ = 0.75.
fn c1_likelihood_ratio() -> Outcome {
    let theta = 0.75;
    let analytic = theta / (1.0 - theta);
    let via_budget = flipnet_core::privacy::budget_for_product(2.0 * theta - 1.0).exp();
    let via_eps = uniform_theta(3f64.ln()).unwrap();

    let flips = 500_000;
    let k = FlipMatrix::uniform(1, theta).unwrap();
    let from = |v: f64| MultiLayerNetwork::new(Tensor3::from_fn([1, 1, flips], |_, _, _| v)).unwrap();
    let p1 = ones_fraction(&flip_network(&from(1.0), &k, 11).unwrap());
    let p0 = ones_fraction(&flip_network(&from(0.0), &k, 12).unwrap());
    let mc = p1 / p0;
    let pass = analytic == 3.0
        && (via_budget - 3.0).abs() <= 1e-12
        && (via_eps - 0.75).abs() <= 1e-15
        && (2.85..=3.15).contains(&mc);
    outcome(pass, format!("analytic {analytic}, exp(eps) {via_budget:.15}, MC over 1e6 flips {mc:.4} in [2.85, 3.15]"))
}

// 2. Debiased entry is unbiased.
fn c2_debias_unbiased() -> Outcome {
    let reps = 100_000;
    let core = Tensor3::from_fn([1, 1, reps], |_, _, _| 0.5);
    let params = DcMsbmParams::new(vec![0, 0], vec![1.0, 1.0], core, None).unwrap();
    let net = sample_network(&probability_tensor(&params).unwrap(), 21).unwrap();
    let profile = PrivacyProfile::constant(2, 0.8).unwrap();
    let flipped = flip_network(&net, &flip_matrix(&profile), 22).unwrap();
    let tilde = debias(&flipped, &profile).unwrap();
    let samples: Vec<f64> = (0..reps).map(|l| tilde.values().get(0, 1, l)).collect();
    let (m, se) = mean_se(&samples);

    // θ P + (1 − θ)(1 − P) + (f_i f_j − 1)/2 with θ = (1 + f_i f_j)/2.
    let (f2, p): (f64, f64) = (0.8 * 0.8, 0.5);
    let theta = 0.5 * (1.0 + f2);
    let expected = theta * p + (1.0 - theta) * (1.0 - p) + 0.5 * (f2 - 1.0);
    let pass = (expected - 0.32).abs() < 1e-15 && (m - expected).abs() <= 4.0 * se;
    outcome(pass, format!("MC mean {m:.5} vs {expected}, |diff| {:.2} SE", (m - expected).abs() / se))
}

fn random_profile(n: usize, seed: u64) -> PrivacyProfile {
    let mut g = gen(seed);
    PrivacyProfile::new((0..n).map(|_| g.gen_range(0.5..=1.0)).collect()).unwrap()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

// 3. Normalized embedding geometry on the noiseless debiased expectation.
fn c3_embedding_geometry() -> Outcome {
    let (n, k, layers) = (90, 3, 6);
    let params = generate_params(n, k, layers, 31).unwrap();
    let p = debiased_expectation(&params, &random_profile(n, 32)).unwrap();
    let r = detect_tensor(&p, &DetectOptions::new(k)).unwrap();
    let c = params.labels();
    let (mut within, mut cross) = (0.0f64, 0.0f64);
    for i in 0..n {
        for j in 0..i {
            let d = dist(r.normalized.row(i), r.normalized.row(j));
            if c[i] == c[j] {
                within = within.max(d);
            } else {
                cross = cross.max((d - 2f64.sqrt()).abs());
            }
        }
    }
    outcome(
        within <= 1e-8 && cross <= 1e-8,
        format!("max within-community distance {within:.2e}, max |cross − √2| {cross:.2e}"),
    )
}

// 4. Exact recovery at the noiseless level.
fn c4_exact_recovery() -> Outcome {
    let mut exact = 0;
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let k = 2 + (seed as usize % 3);
        let n = 110 + 10 * seed as usize;
        let params = generate_params(n, k, 4, 40 + seed).unwrap();
        let p = debiased_expectation(&params, &random_profile(n, 50 + seed)).unwrap();
        let r = detect_tensor(&p, &DetectOptions::new(k).with_seed(seed)).unwrap();
        let h = hamming_error(&r.labels, params.labels(), k).unwrap();
        worst = worst.max(h);
        exact += (h == 0.0) as usize;
    }
    outcome(exact == 10, format!("{exact}/10 seeds with Hamming error exactly 0 (K in 2..=4, n in 110..=200), worst {worst}"))
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

// 5. Matching-based Hamming error equals the brute-force minimum.
fn c5_hamming_oracle() -> Outcome {
    let mut g = gen(5);
    let mut agree = 0;
    for _ in 0..1000 {
        let k = g.gen_range(1..=5);
        let n = g.gen_range(1..=50);
        let a: Vec<usize> = (0..n).map(|_| g.gen_range(0..k)).collect();
        let b: Vec<usize> = (0..n).map(|_| g.gen_range(0..k)).collect();
        let brute = permutations(k)
            .iter()
            .map(|p| a.iter().zip(&b).filter(|(x, y)| p[**x] != **y).count())
            .min()
            .unwrap() as f64
            / n as f64;
        agree += (hamming_error(&a, &b, k).unwrap() == brute) as usize;
    }
    outcome(agree == 1000, format!("{agree}/1000 instances equal to the brute-force permutation minimum"))
}

// 6. Tensor algebra identities and exact Tucker recovery.
fn c6_tensor_identities() -> Outcome {
    let mut g = gen(6);
    let mut worst_identity = 0.0f64;
    for _ in 0..100 {
        let dims = [g.gen_range(1..8), g.gen_range(1..8), g.gen_range(1..8)];
        let t = Tensor3::from_fn(dims, |_, _, _| g.gen_range(-1.0..1.0));
        for mode in Mode::ALL {
            let m = Matrix::from_fn(g.gen_range(1..6), dims[mode.index()], |_, _| g.gen_range(-1.0..1.0));
            let lhs = t.mode_product(&m, mode).unwrap().matricize(mode);
            let rhs = m.matmul(&t.matricize(mode)).unwrap();
            worst_identity = worst_identity.max(lhs.max_abs_diff(&rhs));
        }
    }
    let mut worst_tucker = 0.0f64;
    for seed in 0..20 {
        let mut g = gen(600 + seed);
        let ranks = [2, 2, 2];
        let dims = [g.gen_range(4..10), g.gen_range(4..10), g.gen_range(3..8)];
        let mut t = Tensor3::from_fn(ranks, |_, _, _| g.gen_range(-1.0..1.0));
        for mode in Mode::ALL {
            let a = Matrix::from_fn(dims[mode.index()], 2, |_, _| g.gen_range(-1.0..1.0));
            let q = flipnet_core::truncated_svd(&a, 2).unwrap().u;
            t = t.mode_product(&q, mode).unwrap();
        }
        let f = tucker(&t, ranks, TuckerOptions::default()).unwrap();
        worst_tucker = worst_tucker.max(f.residual_norm(&t).unwrap());
    }
    outcome(
        worst_identity <= 1e-12 && worst_tucker <= 1e-8,
        format!("matricize/mode-product max deviation {worst_identity:.1e} on 100 tensors, Tucker residual {worst_tucker:.1e} on 20"),
    )
}

fn means_by(result: &ExperimentResult, pick: impl Fn(&flipnet::experiments::Cell) -> bool) -> Vec<(f64, f64)> {
    result
        .summaries()
        .into_iter()
        .filter(|s| pick(&s.cell))
        .map(|s| (s.cell.param_value, s.mean))
        .collect()
}

fn all_ok(result: &ExperimentResult) -> bool {
    result.rows.iter().all(|r| r.error.is_ok())
}

// 7. Example 1 trend.
fn c7_example1() -> Outcome {
    let cfg = ExperimentConfig {
        n: vec![400],
        layers: vec![4, 16],
        k: vec![4],
        replications: 20,
        seed: 7,
        ..ExperimentConfig::desk(ExperimentId::Example1)
    };
    let r = run_example1(&cfg).unwrap();
    let l4 = means_by(&r, |c| c.layers == 4);
    let l16 = means_by(&r, |c| c.layers == 16);
    let rho4 = spearman(&l4.iter().map(|p| p.0).collect::<Vec<_>>(), &l4.iter().map(|p| p.1).collect::<Vec<_>>());
    let rho16 = spearman(&l16.iter().map(|p| p.0).collect::<Vec<_>>(), &l16.iter().map(|p| p.1).collect::<Vec<_>>());
    let layered_better = l4
        .iter()
        .zip(&l16)
        .filter(|(a, _)| a.0 >= 0.7 - 1e-9)
        .all(|(a, b)| b.1 <= a.1);
    let fmt = |v: &[(f64, f64)]| v.iter().map(|p| format!("{:.3}", p.1)).collect::<Vec<_>>().join(" ");
    outcome(
        all_ok(&r) && rho4 < 0.0 && rho16 < 0.0 && layered_better,
        format!(
            "Spearman(b, error) L=4 {rho4:.3}, L=16 {rho16:.3}; L=16 <= L=4 for b >= 0.7: {layered_better}; means L=4 [{}] L=16 [{}]",
            fmt(&l4),
            fmt(&l16)
        ),
    )
}

// 8. Example 3 trend.
fn c8_example3() -> Outcome {
    let cfg = ExperimentConfig {
        n: vec![500, 1000],
        layers: vec![4],
        k: vec![4],
        a: vec![0.1, 0.7],
        replications: 10,
        seed: 8,
        ..ExperimentConfig::desk(ExperimentId::Example3)
    };
    let r = run_example3(&cfg).unwrap();
    let m = |n: usize, a: f64| {
        r.summaries().into_iter().find(|s| s.cell.n == n && s.cell.param_value == a).unwrap().mean
    };
    let by_a = m(500, 0.7) > m(500, 0.1) && m(1000, 0.7) > m(1000, 0.1);
    let by_n = m(1000, 0.1) < m(500, 0.1) && m(1000, 0.7) < m(500, 0.7);
    outcome(
        all_ok(&r) && by_a && by_n,
        format!(
            "n=500: a=0.1 {:.4}, a=0.7 {:.4}; n=1000: a=0.1 {:.4}, a=0.7 {:.4}",
            m(500, 0.1),
            m(500, 0.7),
            m(1000, 0.1),
            m(1000, 0.7)
        ),
    )
}

// 9. Uniform-budget trend: smaller ε never gives a smaller mean error.
fn c9_uniform_epsilon() -> Outcome {
    let cfg = ExperimentConfig {
        n: vec![300],
        layers: vec![8],
        k: vec![2],
        epsilon: vec![0.4, 0.2, 0.1],
        replications: 20,
        seed: 9,
        ..ExperimentConfig::desk(ExperimentId::Custom)
    };
    let r = run_custom(&cfg).unwrap();
    let means = means_by(&r, |_| true);
    let mut steps = 0;
    let mut total = 0;
    for i in 0..means.len() {
        for j in 0..means.len() {
            if means[j].0 < means[i].0 {
                total += 1;
                steps += (means[j].1 >= means[i].1) as usize;
            }
        }
    }
    let shown: Vec<String> = means.iter().map(|(e, m)| format!("eps={e}: {m:.4}")).collect();
    outcome(all_ok(&r) && steps == total && total == 3, format!("{steps}/{total} orderings hold; {}", shown.join(", ")))
}

// 10. Flip-strength sweep on the synthetic stand-in network.
fn c10_flip_sweep() -> Outcome {
    let cfg = ExperimentConfig {
        n: vec![500],
        layers: vec![3],
        k: vec![2],
        replications: 20,
        seed: 10,
        ..ExperimentConfig::desk(ExperimentId::FlipSweep)
    };
    let net = sweep_network(&cfg).unwrap();
    let r = run_flip_sweep(&cfg, &net, 2).unwrap();
    let means = means_by(&r, |_| true);
    let rho = spearman(&means.iter().map(|p| p.0).collect::<Vec<_>>(), &means.iter().map(|p| p.1).collect::<Vec<_>>());
    outcome(
        all_ok(&r) && rho > 0.0,
        format!("Spearman(beta, error) {rho:.3}; error {:.4} at 2% to {:.4} at 20%", means[0].1, means[means.len() - 1].1),
    )
}

fn run_cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_flipnet")).args(args).output().map(|o| o.status.success()).unwrap_or(false)
}

fn same_files(a: &Path, b: &Path) -> bool {
    let names = |d: &Path| {
        let mut v: Vec<_> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name()).collect();
        v.sort();
        v
    };
    let (na, nb) = (names(a), names(b));
    na == nb && na.iter().all(|f| std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap())
}

// 11. Budget round trip and byte-identical experiment output.
fn c11_round_trip_and_reproducibility() -> Outcome {
    let mut g = gen(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = g.gen_range(3..10);
        let f: Vec<f64> = (0..n).map(|_| 1.0 - g.gen::<f64>()).filter(|&x| x < 1.0).collect();
        if f.len() < 3 {
            continue;
        }
        let eps = privacy_budget(&PrivacyProfile::new(f.clone()).unwrap());
        for i in 0..f.len() {
            let (ip, j) = ((i + 1) % f.len(), (i + 2) % f.len());
            let back = preference_from_budgets(eps.get(i, ip), eps.get(i, j), eps.get(ip, j)).unwrap();
            worst = worst.max((back - f[i]).abs());
        }
    }

    let tmp = tempfile::tempdir().unwrap();
    let small = "n = 60\nL = 2\nK = 2\nb = 0.9\na = 0.3\nbeta = 0.1\nepsilon = 1\nfixed_L = 2\nfixed_n = 60\nreplications = 2\n";
    let cfg_path = tmp.path().join("small.cfg");
    std::fs::write(&cfg_path, small).unwrap();
    let cfg = cfg_path.to_str().unwrap();
    let mut identical = 0;
    for id in ExperimentId::ALL {
        let (a, b) = (tmp.path().join(format!("{id}-a")), tmp.path().join(format!("{id}-b")));
        let ok = run_cli(&["experiment", id.name(), "--config", cfg, "--seed", "42", "--out", a.to_str().unwrap()])
            && run_cli(&["experiment", id.name(), "--config", cfg, "--seed", "42", "--out", b.to_str().unwrap()]);
        identical += (ok && same_files(&a, &b)) as usize;
    }
    let n_ids = ExperimentId::ALL.len();
    outcome(
        worst <= 1e-10 && identical == n_ids,
        format!("round-trip max error {worst:.1e} over 1000 profiles; {identical}/{n_ids} CLI experiments byte-identical"),
    )
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 11] = [
        (1, "flip likelihood ratio", Duration::from_secs(10), c1_likelihood_ratio),
        (2, "debias unbiasedness", Duration::from_secs(10), c2_debias_unbiased),
        (3, "embedding geometry", Duration::from_secs(30), c3_embedding_geometry),
        (4, "noiseless exact recovery", Duration::from_secs(120), c4_exact_recovery),
        (5, "Hamming oracle", Duration::from_secs(30), c5_hamming_oracle),
        (6, "tensor identities", Duration::from_secs(30), c6_tensor_identities),
        (7, "example 1 trend", Duration::from_secs(600), c7_example1),
        (8, "example 3 trend", Duration::from_secs(600), c8_example3),
        (9, "uniform epsilon trend", Duration::from_secs(600), c9_uniform_epsilon),
        (10, "flip sweep trend", Duration::from_secs(600), c10_flip_sweep),
        (11, "round trip and reproducibility", Duration::from_secs(60), c11_round_trip_and_reproducibility),
    ];
    let total = criteria.len();
    let mut failed = Vec::new();
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= limit;
        println!(
            "criterion {id:>2} [{}] {name}: {} ({:.1} s, limit {} s)",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {total} criteria passed");
}
