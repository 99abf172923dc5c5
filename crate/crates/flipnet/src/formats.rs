//! Plain-text file formats.
//!
//! Every format has a `parse_*` function over text, a `format_*` function
//! producing text, and `read_*`/`write_*` wrappers over paths. Blank lines
//! and lines starting with `#` are ignored by all parsers. Floats are
//! written in Rust's shortest round-trip form, so `parse ∘ format` is the
//! identity.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use flipnet_core::{BudgetMatrix, DcMsbmParams, DiagnosticsReport, Matrix, PrivacyProfile, Tensor3};

use crate::error::{parse_error, IoError, Result};

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

/// Whole file as text, decompressed when the name ends in `.gz`.
pub fn read_text(path: &Path) -> Result<String> {
    let io = |source| IoError::Io { path: path.to_path_buf(), source };
    let file = File::open(path).map_err(io)?;
    let mut text = String::new();
    if is_gz(path) {
        MultiGzDecoder::new(file).read_to_string(&mut text).map_err(io)?;
    } else {
        let mut file = file;
        file.read_to_string(&mut text).map_err(io)?;
    }
    Ok(text)
}

/// Writes `text`, compressing when the name ends in `.gz`. Parent
/// directories are created.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let io = |source| IoError::Io { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let file = File::create(path).map_err(io)?;
    if is_gz(path) {
        let mut enc = GzEncoder::new(file, Compression::default());
        enc.write_all(text.as_bytes()).map_err(io)?;
        enc.finish().map_err(io)?;
    } else {
        let mut file = file;
        file.write_all(text.as_bytes()).map_err(io)?;
    }
    Ok(())
}

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

/// Content lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn field<T: FromStr>(tok: Option<&str>, what: &str, src: &str, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_error(src, line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_error(src, line, format!("bad {what} `{tok}`")))
}

fn no_more(mut it: impl Iterator<Item = impl AsRef<str>>, src: &str, line: usize) -> Result<()> {
    match it.next() {
        Some(extra) => Err(parse_error(src, line, format!("unexpected field `{}`", extra.as_ref()))),
        None => Ok(()),
    }
}

/// 1-based id in `1..=max`, returned 0-based.
pub(crate) fn id(tok: Option<&str>, what: &str, max: usize, src: &str, line: usize) -> Result<usize> {
    let v: usize = field(tok, what, src, line)?;
    if v == 0 || v > max {
        return Err(parse_error(src, line, format!("{what} {v} outside 1..={max}")));
    }
    Ok(v - 1)
}

fn finite(v: f64, what: &str, src: &str, line: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_error(src, line, format!("{what} must be finite, got {v}")))
    }
}

/// Per-node records keyed by 1-based id; every id in `1..=n` exactly once,
/// `n` being the number of records.
fn node_table<T>(
    text: &str,
    src: &str,
    mut parse_rest: impl FnMut(&mut std::str::SplitWhitespace<'_>, usize) -> Result<T>,
) -> Result<Vec<T>> {
    let mut rows: Vec<(usize, usize, T)> = Vec::new();
    for (line, l) in content_lines(text) {
        let mut it = l.split_whitespace();
        let node: usize = field(it.next(), "node id", src, line)?;
        let rest = parse_rest(&mut it, line)?;
        no_more(it, src, line)?;
        rows.push((node, line, rest));
    }
    let n = rows.len();
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    for (node, line, rest) in rows {
        if node == 0 || node > n {
            return Err(parse_error(src, line, format!("node id {node} outside 1..={n}")));
        }
        if slots[node - 1].is_some() {
            return Err(parse_error(src, line, format!("node {node} listed twice")));
        }
        slots[node - 1] = Some(rest);
    }
    Ok(slots.into_iter().map(|s| s.expect("all ids present")).collect())
}

// ---- tensors -------------------------------------------------------------

/// `tensor3 I1 I2 I3`, then `i j l value` for every nonzero entry.
pub fn format_tensor(t: &Tensor3) -> String {
    let [d1, d2, d3] = t.dims();
    let mut s = format!("tensor3 {d1} {d2} {d3}\n");
    for l in 0..d3 {
        for j in 0..d2 {
            for i in 0..d1 {
                let v = t.get(i, j, l);
                if v != 0.0 {
                    let _ = writeln!(s, "{} {} {} {v}", i + 1, j + 1, l + 1);
                }
            }
        }
    }
    s
}

pub fn parse_tensor(text: &str, src: &str) -> Result<Tensor3> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_error(src, 0, "missing `tensor3` header"))?;
    let mut it = header.split_whitespace();
    if it.next() != Some("tensor3") {
        return Err(parse_error(src, hline, "expected `tensor3 I1 I2 I3`"));
    }
    let dims: [usize; 3] = [
        field(it.next(), "I1", src, hline)?,
        field(it.next(), "I2", src, hline)?,
        field(it.next(), "I3", src, hline)?,
    ];
    no_more(it, src, hline)?;
    let mut t = Tensor3::zeros(dims);
    let mut seen = vec![false; t.len()];
    for (line, l) in lines {
        let mut it = l.split_whitespace();
        let i = id(it.next(), "i", dims[0], src, line)?;
        let j = id(it.next(), "j", dims[1], src, line)?;
        let k = id(it.next(), "l", dims[2], src, line)?;
        let v = finite(field(it.next(), "value", src, line)?, "value", src, line)?;
        no_more(it, src, line)?;
        let pos = i + dims[0] * (j + dims[1] * k);
        if std::mem::replace(&mut seen[pos], true) {
            return Err(parse_error(src, line, format!("entry ({} {} {}) repeated", i + 1, j + 1, k + 1)));
        }
        t.set(i, j, k, v);
    }
    Ok(t)
}

pub fn read_tensor(path: &Path) -> Result<Tensor3> {
    parse_tensor(&read_text(path)?, &source_name(path))
}

pub fn write_tensor(path: &Path, t: &Tensor3) -> Result<()> {
    write_text(path, &format_tensor(t))
}

// ---- preferences ---------------------------------------------------------

/// One `node_id f_value` line per node.
pub fn format_preferences(p: &PrivacyProfile) -> String {
    let mut s = String::new();
    for (i, f) in p.values().iter().enumerate() {
        let _ = writeln!(s, "{} {f}", i + 1);
    }
    s
}

pub fn parse_preferences(text: &str, src: &str) -> Result<PrivacyProfile> {
    let f = node_table(text, src, |it, line| {
        let v: f64 = field(it.next(), "preference", src, line)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(parse_error(src, line, format!("preference {v} outside [0, 1]")));
        }
        Ok(v)
    })?;
    Ok(PrivacyProfile::new(f)?)
}

pub fn read_preferences(path: &Path) -> Result<PrivacyProfile> {
    parse_preferences(&read_text(path)?, &source_name(path))
}

pub fn write_preferences(path: &Path, p: &PrivacyProfile) -> Result<()> {
    write_text(path, &format_preferences(p))
}

// ---- ground truth and labels ---------------------------------------------

/// Community labels (0-based) and degree parameters of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub labels: Vec<usize>,
    pub degrees: Vec<f64>,
}

impl GroundTruth {
    pub fn from_params(p: &DcMsbmParams) -> Self {
        GroundTruth { labels: p.labels().to_vec(), degrees: p.degrees().to_vec() }
    }

    /// Largest label plus one.
    pub fn k(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }
}

/// One `node_id community_label degree` line per node.
pub fn format_ground_truth(g: &GroundTruth) -> String {
    let mut s = String::new();
    for (i, (c, d)) in g.labels.iter().zip(&g.degrees).enumerate() {
        let _ = writeln!(s, "{} {} {d}", i + 1, c + 1);
    }
    s
}

pub fn parse_ground_truth(text: &str, src: &str) -> Result<GroundTruth> {
    let rows = node_table(text, src, |it, line| {
        let c: usize = field(it.next(), "community label", src, line)?;
        if c == 0 {
            return Err(parse_error(src, line, "community labels start at 1"));
        }
        let d: f64 = field(it.next(), "degree", src, line)?;
        if !(d.is_finite() && d > 0.0) {
            return Err(parse_error(src, line, format!("degree must be positive, got {d}")));
        }
        Ok((c - 1, d))
    })?;
    let (labels, degrees) = rows.into_iter().unzip();
    Ok(GroundTruth { labels, degrees })
}

pub fn read_ground_truth(path: &Path) -> Result<GroundTruth> {
    parse_ground_truth(&read_text(path)?, &source_name(path))
}

pub fn write_ground_truth(path: &Path, g: &GroundTruth) -> Result<()> {
    write_text(path, &format_ground_truth(g))
}

/// One `node_id label` line per node.
pub fn format_labels(labels: &[usize]) -> String {
    let mut s = String::new();
    for (i, c) in labels.iter().enumerate() {
        let _ = writeln!(s, "{} {}", i + 1, c + 1);
    }
    s
}

/// Labels, 0-based.
pub fn parse_labels(text: &str, src: &str) -> Result<Vec<usize>> {
    node_table(text, src, |it, line| {
        let c: usize = field(it.next(), "label", src, line)?;
        if c == 0 {
            return Err(parse_error(src, line, "labels start at 1"));
        }
        Ok(c - 1)
    })
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    parse_labels(&read_text(path)?, &source_name(path))
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    write_text(path, &format_labels(labels))
}

// ---- budgets -------------------------------------------------------------

/// `n` comma-separated rows; infinite budgets are written `inf`.
pub fn format_budget(b: &BudgetMatrix) -> String {
    format_matrix_csv(b.as_matrix())
}

fn format_matrix_csv(m: &Matrix) -> String {
    let mut s = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// A square symmetric matrix of nonnegative budgets (`inf` allowed).
pub fn parse_budget(text: &str, src: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, l) in content_lines(text) {
        let row = l
            .split(',')
            .map(|tok| {
                let v: f64 = field(Some(tok.trim()), "budget", src, line)?;
                if v.is_nan() || v < 0.0 {
                    return Err(parse_error(src, line, format!("budget must be nonnegative, got {v}")));
                }
                Ok(v)
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
        if rows.last().unwrap().len() != rows[0].len() {
            return Err(parse_error(src, line, "rows have different lengths"));
        }
    }
    let n = rows.len();
    if rows.first().is_some_and(|r| r.len() != n) {
        return Err(parse_error(src, 0, format!("budget matrix is {n} x {}, not square", rows[0].len())));
    }
    for i in 0..n {
        for j in 0..i {
            if rows[i][j] != rows[j][i] {
                return Err(parse_error(src, i + 1, format!("entry ({}, {}) breaks symmetry", i + 1, j + 1)));
            }
        }
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn read_budget(path: &Path) -> Result<Matrix> {
    parse_budget(&read_text(path)?, &source_name(path))
}

pub fn write_budget(path: &Path, b: &BudgetMatrix) -> Result<()> {
    write_text(path, &format_budget(b))
}

// ---- scree ---------------------------------------------------------------

/// Header `k,sigma`, then the singular values in order.
pub fn format_scree(sigma: &[f64]) -> String {
    let mut s = String::from("k,sigma\n");
    for (k, v) in sigma.iter().enumerate() {
        let _ = writeln!(s, "{},{v}", k + 1);
    }
    s
}

pub fn parse_scree(text: &str, src: &str) -> Result<Vec<f64>> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "k,sigma")) => {}
        Some((line, _)) => return Err(parse_error(src, line, "expected header `k,sigma`")),
        None => return Err(parse_error(src, 0, "missing header `k,sigma`")),
    }
    let mut out = Vec::new();
    for (line, l) in lines {
        let mut it = l.split(',');
        let k: usize = field(it.next(), "k", src, line)?;
        if k != out.len() + 1 {
            return Err(parse_error(src, line, format!("expected k = {}, got {k}", out.len() + 1)));
        }
        out.push(field(it.next(), "sigma", src, line)?);
        no_more(it, src, line)?;
    }
    Ok(out)
}

pub fn write_scree(path: &Path, sigma: &[f64]) -> Result<()> {
    write_text(path, &format_scree(sigma))
}

pub fn read_scree(path: &Path) -> Result<Vec<f64>> {
    parse_scree(&read_text(path)?, &source_name(path))
}

// ---- diagnostics ---------------------------------------------------------

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// `key = value` lines; vectors are comma-separated.
pub fn format_diagnostics(r: &DiagnosticsReport) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("n", r.n.to_string());
    kv("L", r.layers.to_string());
    kv("K", r.k.to_string());
    kv("community_sizes", join(&r.community_sizes));
    kv("n_max", r.community_sizes.iter().max().unwrap_or(&0).to_string());
    kv("n_min", r.community_sizes.iter().min().unwrap_or(&0).to_string());
    kv("gamma", join(&r.gamma));
    kv("psi_bar", r.psi_bar.to_string());
    kv("phi_n", r.phi_n.to_string());
    kv("s_n", r.s_n.to_string());
    kv("v", join(&r.v));
    kv("v_infinite", r.v_infinite.to_string());
    kv("bound", r.bound.to_string());
    kv("sigma_min_B", r.sigma_min_b.to_string());
    kv("assumption_1", r.assumption_flags[0].to_string());
    kv("assumption_2", r.assumption_flags[1].to_string());
    kv("assumption_3", r.assumption_flags[2].to_string());
    kv("assumption_4", r.assumption_flags[3].to_string());
    s
}

/// `key = value` pairs in file order, with line numbers.
pub(crate) fn key_values<'a>(text: &'a str, src: &str) -> Result<Vec<(usize, &'a str, &'a str)>> {
    content_lines(text)
        .map(|(line, l)| {
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| parse_error(src, line, "expected `key = value`"))?;
            Ok((line, k.trim(), v.trim()))
        })
        .collect()
}

pub(crate) fn list<T: FromStr>(v: &str, what: &str, src: &str, line: usize) -> Result<Vec<T>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|t| field(Some(t.trim()), what, src, line)).collect()
}

pub fn parse_diagnostics(text: &str, src: &str) -> Result<DiagnosticsReport> {
    let mut r = DiagnosticsReport {
        n: 0,
        layers: 0,
        k: 0,
        community_sizes: Vec::new(),
        gamma: Vec::new(),
        psi_bar: 0.0,
        phi_n: 0.0,
        s_n: 0.0,
        v: Vec::new(),
        v_infinite: false,
        bound: 0.0,
        sigma_min_b: 0.0,
        assumption_flags: [false; 4],
    };
    let mut seen = std::collections::HashSet::new();
    for (line, k, v) in key_values(text, src)? {
        if !seen.insert(k.to_string()) {
            return Err(parse_error(src, line, format!("key `{k}` repeated")));
        }
        match k {
            "n" => r.n = field(Some(v), k, src, line)?,
            "L" => r.layers = field(Some(v), k, src, line)?,
            "K" => r.k = field(Some(v), k, src, line)?,
            "community_sizes" => r.community_sizes = list(v, k, src, line)?,
            "n_max" | "n_min" => {
                let _: usize = field(Some(v), k, src, line)?;
            }
            "gamma" => r.gamma = list(v, k, src, line)?,
            "psi_bar" => r.psi_bar = field(Some(v), k, src, line)?,
            "phi_n" => r.phi_n = field(Some(v), k, src, line)?,
            "s_n" => r.s_n = field(Some(v), k, src, line)?,
            "v" => r.v = list(v, k, src, line)?,
            "v_infinite" => r.v_infinite = field(Some(v), k, src, line)?,
            "bound" => r.bound = field(Some(v), k, src, line)?,
            "sigma_min_B" => r.sigma_min_b = field(Some(v), k, src, line)?,
            "assumption_1" => r.assumption_flags[0] = field(Some(v), k, src, line)?,
            "assumption_2" => r.assumption_flags[1] = field(Some(v), k, src, line)?,
            "assumption_3" => r.assumption_flags[2] = field(Some(v), k, src, line)?,
            "assumption_4" => r.assumption_flags[3] = field(Some(v), k, src, line)?,
            _ => return Err(parse_error(src, line, format!("unknown key `{k}`"))),
        }
    }
    Ok(r)
}

pub fn write_diagnostics(path: &Path, r: &DiagnosticsReport) -> Result<()> {
    write_text(path, &format_diagnostics(r))
}

pub fn read_diagnostics(path: &Path) -> Result<DiagnosticsReport> {
    parse_diagnostics(&read_text(path)?, &source_name(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_round_trip_and_errors() {
        let t = Tensor3::from_fn([2, 3, 2], |i, j, l| if (i + j + l) % 2 == 0 { 0.1 * (i + 2 * j) as f64 - 0.3 } else { 0.0 });
        let back = parse_tensor(&format_tensor(&t), "t").unwrap();
        assert_eq!(back, t);
        assert!(parse_tensor("tensor3 2 2 1\n3 1 1 0.5\n", "t").is_err());
        assert!(parse_tensor("tensor3 2 2 1\n1 1 1 0.5\n1 1 1 0.5\n", "t").is_err());
        let e = parse_tensor("tensor3 2 2 1\n\n1 1 x 0.5\n", "t.txt").unwrap_err().to_string();
        assert!(e.starts_with("t.txt:3:"), "{e}");
    }

    #[test]
    fn preferences_any_order_and_complete() {
        let p = parse_preferences("2 0.5\n# comment\n1 1\n3 0\n", "p").unwrap();
        assert_eq!(p.values(), &[1.0, 0.5, 0.0]);
        assert_eq!(parse_preferences(&format_preferences(&p), "p").unwrap(), p);
        assert!(parse_preferences("1 0.5\n1 0.6\n", "p").is_err());
        assert!(parse_preferences("1 0.5\n3 0.6\n", "p").is_err());
        assert!(parse_preferences("1 1.5\n", "p").is_err());
    }

    #[test]
    fn truth_and_labels_round_trip() {
        let g = GroundTruth { labels: vec![0, 2, 1, 0], degrees: vec![0.5, 1.0, 0.75, 0.625] };
        assert_eq!(parse_ground_truth(&format_ground_truth(&g), "g").unwrap(), g);
        assert_eq!(g.k(), 3);
        let l = vec![1, 0, 0, 3];
        assert_eq!(parse_labels(&format_labels(&l), "l").unwrap(), l);
        assert!(parse_labels("1 0\n", "l").is_err());
        assert!(parse_ground_truth("1 1 0\n", "g").is_err());
    }

    #[test]
    fn budget_round_trip_with_infinity() {
        let p = PrivacyProfile::new(vec![1.0, 1.0, 0.6, 0.0]).unwrap();
        let b = flipnet_core::privacy_budget(&p);
        let text = format_budget(&b);
        assert!(text.starts_with("inf,inf,"));
        let m = parse_budget(&text, "b").unwrap();
        assert_eq!(&m, b.as_matrix());
        assert!(parse_budget("0,1\n2,0\n", "b").is_err());
        assert!(parse_budget("0,1\n", "b").is_err());
        assert!(parse_budget("0,-1\n-1,0\n", "b").is_err());
    }

    #[test]
    fn scree_round_trip() {
        let s = vec![5.0, 2.5, 0.125];
        assert_eq!(parse_scree(&format_scree(&s), "s").unwrap(), s);
        assert!(parse_scree("k,sigma\n2,1\n", "s").is_err());
    }

    #[test]
    fn gz_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/t.txt.gz");
        write_text(&path, "hello\nworld\n").unwrap();
        let raw = std::fs::read(&path).unwrap();
        assert_eq!(&raw[..2], &[0x1f, 0x8b]);
        assert_eq!(read_text(&path).unwrap(), "hello\nworld\n");
    }
}
