//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use flipnet_core::{
    debias, detect, detect_tensor, diagnostics, estimate_k, flip_matrix, flip_network, generate_params,
    hamming_error, privacy_budget, probability_tensor, sample_network, DcMsbmParams, DetectOptions,
    DiagnosticConstants, MultiLayerNetwork, PrivacyProfile, Tensor3,
};

use crate::config::read_config;
use crate::experiments::{self, ExperimentConfig, ExperimentId};
use crate::formats::{self, GroundTruth};
use crate::net_io::{self, ReadOptions};

#[derive(Debug, Parser)]
#[command(name = "flipnet", version, about = "Personalized edge flipping and community detection for multi-layer networks")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file, or output directory for `generate` and `experiment`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Key-value experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Give every node the preference whose edge budget is this value.
    #[arg(long, global = true)]
    pub epsilon_uniform: Option<f64>,
    /// Use the published experiment grids instead of the desk-scale ones.
    #[arg(long, global = true)]
    pub full: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct NetworkArgs {
    /// Layered edge list (`layers L nodes n`, then `layer i j` lines).
    #[arg(long)]
    pub network: PathBuf,
    /// Merge repeated edges instead of rejecting the file.
    #[arg(long)]
    pub dedup: bool,
    /// Keep only nodes in the giant component of every layer.
    #[arg(long)]
    pub giant: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a synthetic network; writes network.txt, truth.txt and core.tensor.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        layers: usize,
        /// Scale applied to the core tensor.
        #[arg(long)]
        sparsity: Option<f64>,
    },
    /// Release a flipped copy of a network.
    Flip {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long)]
        preferences: Option<PathBuf>,
    },
    /// Debias a flipped network into a real tensor.
    Debias {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long)]
        preferences: Option<PathBuf>,
    },
    /// Detect communities from a debiased tensor or a flipped network.
    Detect {
        /// Debiased tensor file.
        #[arg(long, conflicts_with = "network")]
        tensor: Option<PathBuf>,
        /// Flipped network, debiased with the given preferences first.
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long)]
        preferences: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
    },
    /// Hamming error of estimated labels against ground truth or labels.
    Evaluate {
        #[arg(long)]
        labels: PathBuf,
        /// Ground-truth file (`node_id community_label degree`).
        #[arg(long, conflicts_with = "reference")]
        truth: Option<PathBuf>,
        /// Reference labels file (`node_id label`).
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Number of communities; defaults to the largest label seen.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Scree of the projected network for choosing K.
    EstimateK {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long)]
        kappa: usize,
    },
    /// Per-edge privacy budgets as CSV.
    Budget {
        #[arg(long)]
        preferences: Option<PathBuf>,
        /// Node count when the profile comes from --epsilon-uniform.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Rate and assumption quantities of a model instance.
    Diagnostics {
        #[arg(long)]
        truth: PathBuf,
        /// Core tensor `K x K x L`.
        #[arg(long)]
        core: PathBuf,
        #[arg(long)]
        preferences: Option<PathBuf>,
        #[arg(long)]
        sparsity: Option<f64>,
    },
    /// Run an experiment: example1, example2, example3, flip-sweep or custom.
    Experiment {
        id: ExperimentId,
        /// Network for the flip sweep; a synthetic stand-in otherwise.
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long)]
        dedup: bool,
        #[arg(long)]
        giant: bool,
        /// Communities for a loaded flip-sweep network.
        #[arg(long)]
        k: Option<usize>,
    },
}

/// Parses `args` (including the program name) and runs the command.
/// Returns what would be printed on standard output.
pub fn run_from<I, T>(args: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    run(&cli)
}

fn out_or(cli: &Cli, default: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn load_network(a: &NetworkArgs) -> Result<MultiLayerNetwork> {
    let opts = ReadOptions { allow_duplicates: a.dedup };
    let list = net_io::read_edgelist_file(&a.network, opts)?;
    let list = if a.giant { list.giant_component_intersection().1 } else { list };
    Ok(list.to_network())
}

/// Preferences from a file or from `--epsilon-uniform`; exactly one.
fn load_profile(cli: &Cli, file: Option<&Path>, n: Option<usize>) -> Result<PrivacyProfile> {
    match (file, cli.epsilon_uniform) {
        (Some(_), Some(_)) => bail!("give either --preferences or --epsilon-uniform, not both"),
        (Some(path), None) => {
            let p = formats::read_preferences(path)?;
            if let Some(n) = n.filter(|&n| n != p.n()) {
                bail!("{} has {} preferences but the network has {n} nodes", path.display(), p.n());
            }
            Ok(p)
        }
        (None, Some(eps)) => {
            let n = n.context("--epsilon-uniform needs a node count")?;
            Ok(PrivacyProfile::from_uniform_epsilon(n, eps)?)
        }
        (None, None) => bail!("privacy preferences are required: pass --preferences or --epsilon-uniform"),
    }
}

fn seed(cli: &Cli) -> u64 {
    cli.seed.unwrap_or(1)
}

pub fn run(cli: &Cli) -> Result<String> {
    let mut out = String::new();
    match &cli.command {
        Command::Generate { n, k, layers, sparsity } => {
            let dir = out_or(cli, ".");
            let p = generate_params(*n, *k, *layers, seed(cli))?;
            let p = match sparsity {
                Some(s) => DcMsbmParams::new(p.labels().to_vec(), p.degrees().to_vec(), p.core().clone(), Some(*s))?,
                None => p,
            };
            let net = sample_network(&probability_tensor(&p)?, seed(cli))?;
            net_io::write_layered_edgelist(&dir.join("network.txt"), &net)?;
            formats::write_ground_truth(&dir.join("truth.txt"), &GroundTruth::from_params(&p))?;
            formats::write_tensor(&dir.join("core.tensor"), &p.effective_core())?;
            let _ = writeln!(out, "wrote network.txt, truth.txt, core.tensor to {}", dir.display());
        }
        Command::Flip { net, preferences } => {
            let network = load_network(net)?;
            let profile = load_profile(cli, preferences.as_deref(), Some(network.n()))?;
            let flipped = flip_network(&network, &flip_matrix(&profile), seed(cli))?;
            let path = out_or(cli, "flipped.txt");
            net_io::write_layered_edgelist(&path, &flipped)?;
            let _ = writeln!(out, "wrote {}", path.display());
        }
        Command::Debias { net, preferences } => {
            let network = load_network(net)?;
            let profile = load_profile(cli, preferences.as_deref(), Some(network.n()))?;
            let t = debias(&network, &profile)?;
            let path = out_or(cli, "debiased.tensor");
            formats::write_tensor(&path, t.values())?;
            let _ = writeln!(out, "wrote {}", path.display());
        }
        Command::Detect { tensor, network, preferences, k, tau, restarts } => {
            let mut opts = DetectOptions::new(*k).with_seed(seed(cli));
            opts.tau = *tau;
            opts.restarts = *restarts;
            let result = match (tensor, network) {
                (Some(path), None) => detect_tensor(&formats::read_tensor(path)?, &opts)?,
                (None, Some(path)) => {
                    let net = net_io::read_layered_edgelist(path)?;
                    let profile = load_profile(cli, preferences.as_deref(), Some(net.n()))?;
                    detect(&debias(&net, &profile)?, &opts)?
                }
                _ => bail!("give exactly one of --tensor or --network"),
            };
            let path = out_or(cli, "labels.txt");
            formats::write_labels(&path, &result.labels)?;
            let _ = writeln!(out, "objective = {}", result.objective);
            let _ = writeln!(out, "tucker_converged = {}", result.converged);
            let _ = writeln!(out, "layer_rank = {}", result.layer_rank);
            let _ = writeln!(out, "effective_layer_rank = {}", result.effective_layer_rank);
            let _ = writeln!(out, "zero_rows = {}", result.zero_rows.len());
            let _ = writeln!(out, "tau = {}", result.tau);
            let _ = writeln!(out, "wrote {}", path.display());
        }
        Command::Evaluate { labels, truth, reference, k } => {
            let est = formats::read_labels(labels)?;
            let star = match (truth, reference) {
                (Some(t), None) => formats::read_ground_truth(t)?.labels,
                (None, Some(r)) => formats::read_labels(r)?,
                _ => bail!("give exactly one of --truth or --reference"),
            };
            let seen = est.iter().chain(&star).max().map_or(1, |m| m + 1);
            let k = k.unwrap_or(seen);
            let h = hamming_error(&est, &star, k)?;
            let _ = writeln!(out, "hamming_error = {h}");
        }
        Command::EstimateK { net, kappa } => {
            let network = load_network(net)?;
            let scree = estimate_k(&network, *kappa)?;
            let path = out_or(cli, "scree.csv");
            formats::write_scree(&path, &scree.singular_values)?;
            let _ = writeln!(out, "suggested_K = {}", scree.suggested_k);
            let _ = writeln!(out, "wrote {}", path.display());
        }
        Command::Budget { preferences, n } => {
            let profile = load_profile(cli, preferences.as_deref(), *n)?;
            let path = out_or(cli, "budget.csv");
            let b = privacy_budget(&profile);
            formats::write_budget(&path, &b)?;
            let _ = writeln!(out, "max_budget = {}", b.max());
            let _ = writeln!(out, "wrote {}", path.display());
        }
        Command::Diagnostics { truth, core, preferences, sparsity } => {
            let g = formats::read_ground_truth(truth)?;
            let core: Tensor3 = formats::read_tensor(core)?;
            let params = DcMsbmParams::new(g.labels, g.degrees, core, *sparsity)?;
            let profile = load_profile(cli, preferences.as_deref(), Some(params.n()))?;
            let report = diagnostics(&params, &profile, &DiagnosticConstants::default())?;
            let text = formats::format_diagnostics(&report);
            match &cli.out {
                Some(path) => {
                    formats::write_text(path, &text)?;
                    let _ = writeln!(out, "wrote {}", path.display());
                }
                None => out.push_str(&text),
            }
        }
        Command::Experiment { id, network, dedup, giant, k } => {
            let mut cfg = match &cli.config {
                Some(path) => {
                    let cfg = read_config(path, Some(*id))?;
                    if cfg.id != *id {
                        bail!("{} configures `{}`, not `{id}`", path.display(), cfg.id);
                    }
                    cfg
                }
                None if cli.full => ExperimentConfig::full(*id),
                None => ExperimentConfig::desk(*id),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let result = match (id, network) {
                (ExperimentId::FlipSweep, Some(path)) => {
                    let a = NetworkArgs { network: path.clone(), dedup: *dedup, giant: *giant };
                    let net = load_network(&a)?;
                    let k = k.unwrap_or(cfg.k[0]);
                    experiments::run_flip_sweep(&cfg, &net, k)
                }
                (_, Some(_)) => bail!("--network is only used by the flip-sweep experiment"),
                (_, None) => experiments::run(&cfg),
            }
            .map_err(anyhow::Error::msg)?;
            let dir = out_or(cli, "results");
            let name = id.name();
            formats::write_text(&dir.join(format!("{name}.csv")), &result.rows_csv())?;
            formats::write_text(&dir.join(format!("{name}_summary.csv")), &result.summary_csv())?;
            formats::write_text(&dir.join(format!("{name}_failures.csv")), &result.failures_csv())?;
            let failures = result.rows.iter().filter(|r| r.error.is_err()).count();
            let _ = writeln!(out, "{} replications, {failures} failed", result.rows.len());
            let _ = writeln!(out, "wrote {name}.csv, {name}_summary.csv, {name}_failures.csv to {}", dir.display());
        }
    }
    Ok(out)
}
