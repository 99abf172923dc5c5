//! Key-value experiment configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! experiment = example1
//! n = 400
//! L = 4, 16
//! b = 0.5, 0.6, 0.7
//! replications = 20
//! ```
//!
//! Keys not given fall back to the desk-scale defaults of the experiment
//! (or the published grids when `full = true`). Lists are comma-separated.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{parse_error, Result};
use crate::experiments::{ExperimentConfig, ExperimentId};
use crate::formats::{field, key_values, list, read_text};

const KEYS: &[&str] = &[
    "experiment",
    "full",
    "n",
    "L",
    "K",
    "b",
    "a",
    "beta",
    "epsilon",
    "fixed_L",
    "fixed_n",
    "flip_low",
    "flip_high",
    "replications",
    "restarts",
    "seed",
];

/// Parses a config. `default_id` is used when the text has no
/// `experiment` key.
pub fn parse_config(text: &str, src: &str, default_id: Option<ExperimentId>) -> Result<ExperimentConfig> {
    let pairs = key_values(text, src)?;
    let mut seen = std::collections::HashSet::new();
    for &(line, k, _) in &pairs {
        if !KEYS.contains(&k) {
            return Err(parse_error(src, line, format!("unknown key `{k}`")));
        }
        if !seen.insert(k) {
            return Err(parse_error(src, line, format!("key `{k}` repeated")));
        }
    }
    let lookup = |key: &str| pairs.iter().find(|(_, k, _)| *k == key).map(|&(line, _, v)| (line, v));

    let id = match lookup("experiment") {
        Some((line, v)) => v.parse::<ExperimentId>().map_err(|e| parse_error(src, line, e))?,
        None => default_id.ok_or_else(|| parse_error(src, 0, "missing key `experiment`"))?,
    };
    let full = match lookup("full") {
        Some((line, v)) => field(Some(v), "full", src, line)?,
        None => false,
    };
    let mut cfg = if full { ExperimentConfig::full(id) } else { ExperimentConfig::desk(id) };

    for &(line, k, v) in &pairs {
        match k {
            "experiment" | "full" => {}
            "n" => cfg.n = list(v, k, src, line)?,
            "L" => cfg.layers = list(v, k, src, line)?,
            "K" => cfg.k = list(v, k, src, line)?,
            "b" => cfg.b = list(v, k, src, line)?,
            "a" => cfg.a = list(v, k, src, line)?,
            "beta" => cfg.beta = list(v, k, src, line)?,
            "epsilon" => cfg.epsilon = list(v, k, src, line)?,
            "fixed_L" => cfg.fixed_layers = field(Some(v), k, src, line)?,
            "fixed_n" => cfg.fixed_n = field(Some(v), k, src, line)?,
            "flip_low" => cfg.flip_low = field(Some(v), k, src, line)?,
            "flip_high" => cfg.flip_high = field(Some(v), k, src, line)?,
            "replications" => cfg.replications = field(Some(v), k, src, line)?,
            "restarts" => cfg.restarts = field(Some(v), k, src, line)?,
            "seed" => cfg.seed = field(Some(v), k, src, line)?,
            _ => unreachable!("keys checked above"),
        }
    }
    cfg.validate().map_err(|e| parse_error(src, 0, e))?;
    Ok(cfg)
}

pub fn read_config(path: &Path, default_id: Option<ExperimentId>) -> Result<ExperimentConfig> {
    parse_config(&read_text(path)?, &path.display().to_string(), default_id)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Every key, so the output re-parses to the same configuration.
pub fn format_config(cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("experiment", cfg.id.to_string());
    kv("n", join(&cfg.n));
    kv("L", join(&cfg.layers));
    kv("K", join(&cfg.k));
    kv("b", join(&cfg.b));
    kv("a", join(&cfg.a));
    kv("beta", join(&cfg.beta));
    kv("epsilon", join(&cfg.epsilon));
    kv("fixed_L", cfg.fixed_layers.to_string());
    kv("fixed_n", cfg.fixed_n.to_string());
    kv("flip_low", cfg.flip_low.to_string());
    kv("flip_high", cfg.flip_high.to_string());
    kv("replications", cfg.replications.to_string());
    kv("restarts", cfg.restarts.to_string());
    kv("seed", cfg.seed.to_string());
    s
}
