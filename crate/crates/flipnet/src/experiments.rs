//! Monte-Carlo experiments on synthetic and loaded networks.
//!
//! Each experiment expands its configuration into grid cells and runs
//! `replications` independent pipelines per cell: generate (or reuse) a
//! network, draw a preference profile, flip, debias, detect, score. Every
//! replication draws from its own substream keyed by the experiment, the
//! cell's parameter values and the replication index, so results do not
//! depend on scheduling, and raising `replications` keeps earlier rows.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use flipnet_core::rng::{self, derive_seed, purpose};
use flipnet_core::{
    debias, detect, detect_tensor, flip_matrix, flip_network, generate_params, hamming_error,
    probability_tensor, sample_network, DetectOptions, MultiLayerNetwork, PrivacyProfile,
};
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    /// `f_i ~ Unif(0, b)` over a grid of `b`.
    Example1,
    /// `f_i ~ Unif(0.95, 1)`, growing `n` at fixed `L`, then growing `L`
    /// at fixed `n`.
    Example2,
    /// `⌊2 n^a⌋` nodes with `f = sqrt(log n / (nL))`, the rest `f = 1`.
    Example3,
    /// A fraction `β` of nodes at `flip_low`, the rest at `flip_high`,
    /// scored against the detection without flipping.
    FlipSweep,
    /// Constant profile with a common edge budget `ε` per grid point, or
    /// no flipping when the `epsilon` grid is empty.
    Custom,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] = [
        ExperimentId::Example1,
        ExperimentId::Example2,
        ExperimentId::Example3,
        ExperimentId::FlipSweep,
        ExperimentId::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Example1 => "example1",
            ExperimentId::Example2 => "example2",
            ExperimentId::Example3 => "example3",
            ExperimentId::FlipSweep => "flip-sweep",
            ExperimentId::Custom => "custom",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}` (expected example1, example2, example3, flip-sweep or custom)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub n: Vec<usize>,
    pub layers: Vec<usize>,
    pub k: Vec<usize>,
    /// Example 1 upper bounds of the preference distribution.
    pub b: Vec<f64>,
    /// Example 3 exponents.
    pub a: Vec<f64>,
    /// Flip-sweep fractions of strongly private nodes.
    pub beta: Vec<f64>,
    /// Custom uniform edge budgets.
    pub epsilon: Vec<f64>,
    /// Example 2: `L` while `n` varies.
    pub fixed_layers: usize,
    /// Example 2: `n` while `L` varies.
    pub fixed_n: usize,
    pub flip_low: f64,
    pub flip_high: f64,
    pub replications: usize,
    pub restarts: usize,
    pub seed: u64,
}

fn b_grid() -> Vec<f64> {
    (0..10).map(|i| 0.5 + 0.05 * i as f64).collect()
}

fn beta_grid() -> Vec<f64> {
    (1..=10).map(|i| 0.02 * i as f64).collect()
}

impl ExperimentConfig {
    /// Reduced grids that finish in minutes on a laptop.
    pub fn desk(id: ExperimentId) -> Self {
        let base = ExperimentConfig {
            id,
            n: vec![400],
            layers: vec![4, 8, 16, 32],
            k: vec![4],
            b: Vec::new(),
            a: Vec::new(),
            beta: Vec::new(),
            epsilon: Vec::new(),
            fixed_layers: 8,
            fixed_n: 200,
            flip_low: 0.02,
            flip_high: 0.98,
            replications: 20,
            restarts: 10,
            seed: 1,
        };
        match id {
            ExperimentId::Example1 => ExperimentConfig { b: b_grid(), ..base },
            ExperimentId::Example2 => {
                ExperimentConfig { n: (2..=8).map(|i| 50 * i).collect(), ..base }
            }
            ExperimentId::Example3 => ExperimentConfig {
                n: vec![300, 500],
                layers: vec![4],
                a: vec![0.1, 0.3, 0.5, 0.7],
                ..base
            },
            ExperimentId::FlipSweep => ExperimentConfig {
                n: vec![500],
                layers: vec![3],
                k: vec![2],
                beta: beta_grid(),
                ..base
            },
            ExperimentId::Custom => ExperimentConfig {
                n: vec![300],
                layers: vec![8],
                k: vec![2],
                epsilon: vec![0.4, 0.2, 0.1],
                ..base
            },
        }
    }

    /// The published grids with 100 replications.
    pub fn full(id: ExperimentId) -> Self {
        let desk = ExperimentConfig::desk(id);
        let base = ExperimentConfig { replications: 100, ..desk };
        match id {
            ExperimentId::Example1 => ExperimentConfig { n: vec![400, 800], ..base },
            ExperimentId::Example2 => ExperimentConfig {
                n: (2..=10).map(|i| 50 * i).collect(),
                layers: vec![4, 8, 16, 32, 64, 128],
                ..base
            },
            ExperimentId::Example3 => {
                ExperimentConfig { n: vec![500, 1000, 1500, 2000, 2500], ..base }
            }
            ExperimentId::FlipSweep | ExperimentId::Custom => base,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(format!("grid `{name}` is empty"))
            } else {
                Ok(())
            }
        };
        if self.replications == 0 {
            return Err("replications must be at least 1".into());
        }
        if self.restarts == 0 {
            return Err("restarts must be at least 1".into());
        }
        nonempty("n", self.n.len())?;
        nonempty("L", self.layers.len())?;
        nonempty("K", self.k.len())?;
        match self.id {
            ExperimentId::Example1 => nonempty("b", self.b.len())?,
            ExperimentId::Example3 => nonempty("a", self.a.len())?,
            ExperimentId::FlipSweep => nonempty("beta", self.beta.len())?,
            ExperimentId::Example2 | ExperimentId::Custom => {}
        }
        let in_unit = |name: &str, v: &[f64]| match v.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            Some(x) => Err(format!("`{name}` value {x} outside [0, 1]")),
            None => Ok(()),
        };
        in_unit("b", &self.b)?;
        in_unit("a", &self.a)?;
        in_unit("beta", &self.beta)?;
        in_unit("flip_low", &[self.flip_low])?;
        in_unit("flip_high", &[self.flip_high])?;
        if let Some(e) = self.epsilon.iter().find(|e| !(**e >= 0.0)) {
            return Err(format!("`epsilon` value {e} must be nonnegative"));
        }
        if self.n.contains(&0) || self.layers.contains(&0) || self.k.contains(&0) {
            return Err("n, L and K must be positive".into());
        }
        Ok(())
    }
}

/// One grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub layers: usize,
    pub k: usize,
    pub param_name: &'static str,
    pub param_value: f64,
}

pub fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    let mut grid = |name: &'static str, values: &[f64], ns: &[usize], ls: &[usize]| {
        for &n in ns {
            for &layers in ls {
                for &k in &cfg.k {
                    for &v in values {
                        out.push(Cell { n, layers, k, param_name: name, param_value: v });
                    }
                }
            }
        }
    };
    match cfg.id {
        ExperimentId::Example1 => grid("b", &cfg.b, &cfg.n, &cfg.layers),
        ExperimentId::Example2 => {
            for &n in &cfg.n {
                grid("n", &[n as f64], &[n], &[cfg.fixed_layers]);
            }
            for &l in &cfg.layers {
                grid("L", &[l as f64], &[cfg.fixed_n], &[l]);
            }
        }
        ExperimentId::Example3 => grid("a", &cfg.a, &cfg.n, &cfg.layers),
        ExperimentId::FlipSweep => grid("beta", &cfg.beta, &cfg.n, &cfg.layers),
        ExperimentId::Custom if cfg.epsilon.is_empty() => grid("none", &[0.0], &cfg.n, &cfg.layers),
        ExperimentId::Custom => grid("epsilon", &cfg.epsilon, &cfg.n, &cfg.layers),
    }
    out
}

/// Outcome of one replication; `error` holds the Hamming error or the
/// message of the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRow {
    pub cell: usize,
    pub replication: usize,
    pub error: Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: Cell,
    pub completed: usize,
    pub failures: usize,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub id: ExperimentId,
    pub cells: Vec<Cell>,
    /// Ordered by cell, then replication.
    pub rows: Vec<ReplicationRow>,
}

impl ExperimentResult {
    pub fn summaries(&self) -> Vec<CellSummary> {
        self.cells
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                let errs: Vec<f64> =
                    self.rows.iter().filter(|r| r.cell == c).filter_map(|r| r.error.clone().ok()).collect();
                let failures = self.rows.iter().filter(|r| r.cell == c && r.error.is_err()).count();
                let (mean, stderr) = mean_stderr(&errs);
                CellSummary { cell: cell.clone(), completed: errs.len(), failures, mean, stderr }
            })
            .collect()
    }

    /// `experiment,n,L,K,param_name,param_value,replication,hamming_error`;
    /// failed replications carry `NaN`.
    pub fn rows_csv(&self) -> String {
        let mut s = String::from("experiment,n,L,K,param_name,param_value,replication,hamming_error\n");
        for r in &self.rows {
            let c = &self.cells[r.cell];
            let e = r.error.as_ref().map_or(f64::NAN, |e| *e);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{e}",
                self.id, c.n, c.layers, c.k, c.param_name, c.param_value, r.replication + 1
            );
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        let mut s =
            String::from("experiment,n,L,K,param_name,param_value,replications,failures,mean_error,stderr\n");
        for m in self.summaries() {
            let c = &m.cell;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                self.id, c.n, c.layers, c.k, c.param_name, c.param_value, m.completed, m.failures, m.mean, m.stderr
            );
        }
        s
    }

    /// `replication,param,value,error` for every failed replication.
    pub fn failures_csv(&self) -> String {
        let mut s = String::from("replication,param,value,error\n");
        for r in &self.rows {
            if let Err(msg) = &r.error {
                let c = &self.cells[r.cell];
                let msg = msg.replace(['\n', ','], " ");
                let _ = writeln!(s, "{},{},{},{msg}", r.replication + 1, c.param_name, c.param_value);
            }
        }
        s
    }
}

pub fn mean_stderr(x: &[f64]) -> (f64, f64) {
    if x.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Spearman rank correlation with average ranks for ties. `NaN` when
/// either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    cov / (vx * vy).sqrt()
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Seed of replication `rep` in `cell`.
pub fn replication_seed(cfg: &ExperimentConfig, cell: &Cell, rep: usize) -> u64 {
    derive_seed(
        cfg.seed,
        &[
            purpose::REPLICATION,
            cfg.id.tag(),
            cell.n as u64,
            cell.layers as u64,
            cell.k as u64,
            cell.param_value.to_bits(),
            rep as u64,
        ],
    )
}

fn profile_for(cfg: &ExperimentConfig, cell: &Cell, seed: u64) -> flipnet_core::Result<PrivacyProfile> {
    let n = cell.n;
    let uniform = |lo: f64, hi: f64| {
        let mut g = rng::stream(seed, &[purpose::PROFILE]);
        PrivacyProfile::new((0..n).map(|_| lo + (hi - lo) * g.gen::<f64>()).collect())
    };
    match cfg.id {
        ExperimentId::Example1 => uniform(0.0, cell.param_value),
        ExperimentId::Example2 => uniform(0.95, 1.0),
        ExperimentId::Example3 => {
            let nf = n as f64;
            let count = ((2.0 * nf.powf(cell.param_value)).floor() as usize).min(n);
            let low = (nf.ln() / (nf * cell.layers as f64)).sqrt();
            PrivacyProfile::polarized(n, count, low, 1.0, seed)
        }
        ExperimentId::FlipSweep => {
            let count = ((cell.param_value * n as f64 + 1e-9).floor() as usize).min(n);
            PrivacyProfile::polarized(n, count, cfg.flip_low, cfg.flip_high, seed)
        }
        ExperimentId::Custom if cell.param_name == "none" => PrivacyProfile::constant(n, 1.0),
        ExperimentId::Custom => PrivacyProfile::from_uniform_epsilon(n, cell.param_value),
    }
}

fn detect_options(cfg: &ExperimentConfig, k: usize, seed: u64) -> DetectOptions {
    let mut o = DetectOptions::new(k).with_seed(derive_seed(seed, &[purpose::KMEDIANS]));
    o.restarts = cfg.restarts;
    o
}

/// Flip with `profile`, debias, detect, and score against `truth`.
fn privatize_and_score(
    cfg: &ExperimentConfig,
    net: &MultiLayerNetwork,
    profile: &PrivacyProfile,
    truth: &[usize],
    k: usize,
    seed: u64,
) -> flipnet_core::Result<f64> {
    let flipped = flip_network(net, &flip_matrix(profile), seed)?;
    let tilde = debias(&flipped, profile)?;
    let found = detect(&tilde, &detect_options(cfg, k, seed))?;
    hamming_error(&found.labels, truth, k)
}

fn synthetic_replication(cfg: &ExperimentConfig, cell: &Cell, seed: u64) -> flipnet_core::Result<f64> {
    let params = generate_params(cell.n, cell.k, cell.layers, seed)?;
    let net = sample_network(&probability_tensor(&params)?, seed)?;
    let profile = profile_for(cfg, cell, seed)?;
    privatize_and_score(cfg, &net, &profile, params.labels(), cell.k, seed)
}

fn run_tasks(
    cfg: &ExperimentConfig,
    cells: Vec<Cell>,
    task: impl Fn(usize, &Cell, u64) -> flipnet_core::Result<f64> + Sync,
) -> ExperimentResult {
    let work: Vec<(usize, usize)> =
        (0..cells.len()).flat_map(|c| (0..cfg.replications).map(move |r| (c, r))).collect();
    let rows = work
        .par_iter()
        .map(|&(c, r)| {
            let seed = replication_seed(cfg, &cells[c], r);
            let error = task(c, &cells[c], seed).map_err(|e| e.to_string());
            ReplicationRow { cell: c, replication: r, error }
        })
        .collect();
    ExperimentResult { id: cfg.id, cells, rows }
}

fn run_synthetic(cfg: &ExperimentConfig) -> ExperimentResult {
    run_tasks(cfg, cells(cfg), |_, cell, seed| synthetic_replication(cfg, cell, seed))
}

fn expect_id(cfg: &ExperimentConfig, id: ExperimentId) -> Result<(), String> {
    if cfg.id != id {
        return Err(format!("configuration is for `{}`, not `{id}`", cfg.id));
    }
    cfg.validate()
}

pub fn run_example1(cfg: &ExperimentConfig) -> Result<ExperimentResult, String> {
    expect_id(cfg, ExperimentId::Example1)?;
    Ok(run_synthetic(cfg))
}

pub fn run_example2(cfg: &ExperimentConfig) -> Result<ExperimentResult, String> {
    expect_id(cfg, ExperimentId::Example2)?;
    Ok(run_synthetic(cfg))
}

pub fn run_example3(cfg: &ExperimentConfig) -> Result<ExperimentResult, String> {
    expect_id(cfg, ExperimentId::Example3)?;
    Ok(run_synthetic(cfg))
}

pub fn run_custom(cfg: &ExperimentConfig) -> Result<ExperimentResult, String> {
    expect_id(cfg, ExperimentId::Custom)?;
    Ok(run_synthetic(cfg))
}

/// The synthetic stand-in network of the flip sweep for the first grid
/// values of `n`, `L` and `K`.
pub fn sweep_network(cfg: &ExperimentConfig) -> flipnet_core::Result<MultiLayerNetwork> {
    let seed = derive_seed(cfg.seed, &[purpose::SAMPLE, cfg.id.tag()]);
    let params = generate_params(cfg.n[0], cfg.k[0], cfg.layers[0], seed)?;
    sample_network(&probability_tensor(&params)?, seed)
}

/// Reference labels of the sweep: detection on the unflipped network.
pub fn sweep_reference(cfg: &ExperimentConfig, net: &MultiLayerNetwork, k: usize) -> flipnet_core::Result<Vec<usize>> {
    let seed = derive_seed(cfg.seed, &[purpose::KMEDIANS, cfg.id.tag()]);
    Ok(detect_tensor(net.adjacency(), &detect_options(cfg, k, seed))?.labels)
}

/// Flip-strength sweep on `net` with `k` communities. Cells take `n` and
/// `L` from the network; the config grids for them are ignored.
pub fn run_flip_sweep(
    cfg: &ExperimentConfig,
    net: &MultiLayerNetwork,
    k: usize,
) -> Result<ExperimentResult, String> {
    expect_id(cfg, ExperimentId::FlipSweep)?;
    if k == 0 || k > net.n() {
        return Err(format!("need 1 <= K <= n, got K={k} n={}", net.n()));
    }
    let reference = sweep_reference(cfg, net, k).map_err(|e| e.to_string())?;
    let cells: Vec<Cell> = cfg
        .beta
        .iter()
        .map(|&b| Cell { n: net.n(), layers: net.layers(), k, param_name: "beta", param_value: b })
        .collect();
    Ok(run_tasks(cfg, cells, |_, cell, seed| {
        let profile = profile_for(cfg, cell, seed)?;
        privatize_and_score(cfg, net, &profile, &reference, k, seed)
    }))
}

/// Runs `cfg`; the flip sweep uses its synthetic stand-in network.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult, String> {
    match cfg.id {
        ExperimentId::Example1 => run_example1(cfg),
        ExperimentId::Example2 => run_example2(cfg),
        ExperimentId::Example3 => run_example3(cfg),
        ExperimentId::Custom => run_custom(cfg),
        ExperimentId::FlipSweep => {
            cfg.validate()?;
            let net = sweep_network(cfg).map_err(|e| e.to_string())?;
            run_flip_sweep(cfg, &net, cfg.k[0])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(id: ExperimentId) -> ExperimentConfig {
        ExperimentConfig {
            n: vec![40],
            layers: vec![2],
            k: vec![2],
            b: vec![0.9],
            a: vec![0.2],
            beta: vec![0.0, 0.1],
            epsilon: vec![1.0],
            fixed_layers: 2,
            fixed_n: 40,
            replications: 2,
            restarts: 2,
            ..ExperimentConfig::desk(id)
        }
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        // Ties get average ranks: x ranks (1, 2.5, 2.5, 4).
        let r = spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]);
        assert!((r - 0.9486832980505138).abs() < 1e-12, "{r}");
        assert!(spearman(&[1.0, 1.0], &[1.0, 2.0]).is_nan());
    }

    #[test]
    fn grids_expand_as_documented() {
        let c = cells(&ExperimentConfig::desk(ExperimentId::Example1));
        assert_eq!(c.len(), 4 * 10);
        let c = cells(&ExperimentConfig::desk(ExperimentId::Example2));
        assert_eq!(c.iter().filter(|c| c.param_name == "n").count(), 7);
        assert!(c.iter().filter(|c| c.param_name == "n").all(|c| c.layers == 8 && c.n <= 400));
        assert!(c.iter().filter(|c| c.param_name == "L").all(|c| c.n == 200 && c.layers <= 32));
        assert_eq!(ExperimentConfig::desk(ExperimentId::Example2).replications, 20);
        let mut cfg = ExperimentConfig::desk(ExperimentId::Custom);
        cfg.epsilon.clear();
        assert_eq!(cells(&cfg)[0].param_name, "none");
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::desk(ExperimentId::Example1);
        assert!(cfg.validate().is_ok());
        cfg.replications = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::desk(ExperimentId::Example3);
        cfg.a.clear();
        assert!(cfg.validate().is_err());
        assert!(run_example1(&ExperimentConfig::desk(ExperimentId::Example2)).is_err());
        assert_eq!("flip-sweep".parse::<ExperimentId>().unwrap(), ExperimentId::FlipSweep);
        assert!("example4".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn every_experiment_runs_and_is_reproducible() {
        for id in ExperimentId::ALL {
            let cfg = tiny(id);
            let a = run(&cfg).unwrap();
            let b = run(&cfg).unwrap();
            assert_eq!(a.rows_csv(), b.rows_csv(), "{id}");
            assert!(a.rows.iter().all(|r| r.error.is_ok()), "{id}: {:?}", a.rows);
            assert_eq!(a.summaries().iter().map(|s| s.completed).sum::<usize>(), a.rows.len());
        }
    }

    #[test]
    fn more_replications_keep_earlier_rows() {
        let cfg = tiny(ExperimentId::Example1);
        let more = ExperimentConfig { replications: 4, ..cfg.clone() };
        let a = run(&cfg).unwrap();
        let b = run(&more).unwrap();
        assert_eq!(a.rows[..], b.rows[..2]);
    }

    #[test]
    fn sweep_without_private_nodes_matches_reference() {
        let mut cfg = tiny(ExperimentId::FlipSweep);
        cfg.flip_high = 1.0;
        cfg.beta = vec![0.0];
        let r = run(&cfg).unwrap();
        assert!(r.rows.iter().all(|r| r.error == Ok(0.0)), "{:?}", r.rows);
    }

    #[test]
    fn failures_are_recorded_and_the_run_continues() {
        let mut cfg = tiny(ExperimentId::Example1);
        cfg.k = vec![2, 50];
        let r = run(&cfg).unwrap();
        let s = r.summaries();
        assert_eq!(s[0].failures, 0);
        assert_eq!(s[1].failures, 2);
        assert!(r.failures_csv().lines().count() == 3);
        assert!(r.rows_csv().contains("NaN"));
    }
}
