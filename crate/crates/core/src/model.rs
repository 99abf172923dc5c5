//! Degree-corrected multi-layer stochastic block model.
//!
//! Edge `(i, j)` in layer `l` appears with probability
//! `d_i · d_j · B(c_i, c_j, l)`, where `c` holds community labels, `d`
//! degree parameters and `B` is a `K x K x L` core tensor symmetric in its
//! first two modes. Labels are shared by every layer.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::Matrix;
use crate::rng::{self, purpose};
use crate::tensor::{Mode, Tensor3};

/// Ground-truth parameters of a DC-MSBM. Labels are 0-based internally.
#[derive(Debug, Clone, PartialEq)]
pub struct DcMsbmParams {
    labels: Vec<usize>,
    degrees: Vec<f64>,
    core: Tensor3,
    sparsity: Option<f64>,
}

impl DcMsbmParams {
    /// Validates and builds the parameters.
    ///
    /// `core` is `K x K x L`. When `sparsity` is given it multiplies the
    /// core, i.e. the effective core is `s_n · B`.
    pub fn new(
        labels: Vec<usize>,
        degrees: Vec<f64>,
        core: Tensor3,
        sparsity: Option<f64>,
    ) -> Result<Self> {
        let [k, k2, _] = core.dims();
        if k == 0 || k != k2 {
            return Err(invalid(format_args!("core must be K x K x L, got {:?}", core.dims())));
        }
        if labels.len() != degrees.len() {
            return Err(mismatch(
                format_args!("{} degrees", labels.len()),
                degrees.len(),
            ));
        }
        if labels.is_empty() {
            return Err(invalid("at least one node is required"));
        }
        if let Some(s) = sparsity {
            if !(s > 0.0 && s.is_finite()) {
                return Err(invalid(format_args!("sparsity must be positive, got {s}")));
            }
        }
        let mut seen = vec![false; k];
        for (i, &c) in labels.iter().enumerate() {
            if c >= k {
                return Err(invalid(format_args!(
                    "node {} has label {} outside 1..={k}",
                    i + 1,
                    c + 1
                )));
            }
            seen[c] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(invalid(format_args!("community {} has no members", missing + 1)));
        }
        for (i, &d) in degrees.iter().enumerate() {
            if !(d > 0.0 && d.is_finite()) {
                return Err(invalid(format_args!("degree of node {} must be positive, got {d}", i + 1)));
            }
        }
        if core.as_slice().iter().any(|&b| !(0.0..=1.0).contains(&b)) {
            return Err(invalid("core entries must lie in [0, 1]"));
        }
        if core.semi_symmetry_defect() > 1e-12 {
            return Err(invalid("core must be symmetric in its first two modes"));
        }

        let params = DcMsbmParams { labels, degrees, core, sparsity };
        // Largest probability in each block pair is reached at the largest degrees.
        let mut dmax = vec![0.0f64; k];
        for (&c, &d) in params.labels.iter().zip(&params.degrees) {
            dmax[c] = dmax[c].max(d);
        }
        let scale = params.sparsity.unwrap_or(1.0);
        for l in 0..params.layers() {
            for a in 0..k {
                for b in 0..k {
                    let p = dmax[a] * dmax[b] * scale * params.core.get(a, b, l);
                    if p > 1.0 {
                        return Err(Error::ProbabilityOutOfRange { index: (a, b, l), value: p });
                    }
                }
            }
        }
        Ok(params)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn layers(&self) -> usize {
        self.core.dims()[2]
    }

    pub fn k(&self) -> usize {
        self.core.dims()[0]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// The core as supplied.
    pub fn core(&self) -> &Tensor3 {
        &self.core
    }

    pub fn sparsity(&self) -> Option<f64> {
        self.sparsity
    }

    /// `s_n · B`, or `B` when no sparsity was supplied.
    pub fn effective_core(&self) -> Tensor3 {
        match self.sparsity {
            None => self.core.clone(),
            Some(s) => {
                let mut c = self.core.clone();
                c.as_mut_slice().iter_mut().for_each(|x| *x *= s);
                c
            }
        }
    }

    /// Community sizes `n_k`.
    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k()];
        for &c in &self.labels {
            sizes[c] += 1;
        }
        sizes
    }

    /// `n x K` membership matrix `Z`.
    pub fn membership(&self) -> Matrix {
        let mut z = Matrix::zeros(self.n(), self.k());
        for (i, &c) in self.labels.iter().enumerate() {
            z[(i, c)] = 1.0;
        }
        z
    }

    /// `D · Z`, the membership matrix with rows scaled by the degrees.
    pub fn degree_membership(&self) -> Matrix {
        let mut z = self.membership();
        for (i, &d) in self.degrees.iter().enumerate() {
            z.row_mut(i).iter_mut().for_each(|x| *x *= d);
        }
        z
    }
}

/// A binary adjacency tensor, `n x n x L`, symmetric within each layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLayerNetwork {
    adjacency: Tensor3,
}

impl MultiLayerNetwork {
    /// Checks that entries are 0/1 and every layer is symmetric.
    pub fn new(adjacency: Tensor3) -> Result<Self> {
        let [n, n2, _] = adjacency.dims();
        if n != n2 {
            return Err(mismatch(format_args!("n x n x L"), format_args!("{:?}", adjacency.dims())));
        }
        if adjacency.as_slice().iter().any(|&x| x != 0.0 && x != 1.0) {
            return Err(invalid("adjacency entries must be 0 or 1"));
        }
        if adjacency.semi_symmetry_defect() != 0.0 {
            return Err(invalid("every layer must be symmetric"));
        }
        Ok(MultiLayerNetwork { adjacency })
    }

    pub fn empty(n: usize, layers: usize) -> Self {
        MultiLayerNetwork { adjacency: Tensor3::zeros([n, n, layers]) }
    }

    pub fn n(&self) -> usize {
        self.adjacency.dims()[0]
    }

    pub fn layers(&self) -> usize {
        self.adjacency.dims()[2]
    }

    pub fn adjacency(&self) -> &Tensor3 {
        &self.adjacency
    }

    pub fn into_adjacency(self) -> Tensor3 {
        self.adjacency
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize, l: usize) -> bool {
        self.adjacency.get(i, j, l) != 0.0
    }

    /// Sets both `(i, j, l)` and `(j, i, l)`.
    pub fn set_edge(&mut self, i: usize, j: usize, l: usize, present: bool) {
        let v = if present { 1.0 } else { 0.0 };
        self.adjacency.set(i, j, l, v);
        self.adjacency.set(j, i, l, v);
    }

    /// Edges with `i <= j` as `(layer, i, j)`, 0-based, in layer-major order.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for l in 0..self.layers() {
            for i in 0..n {
                for j in i..n {
                    if self.has_edge(i, j, l) {
                        out.push((l, i, j));
                    }
                }
            }
        }
        out
    }

    /// Induced subnetwork on `nodes` (0-based, in the given order).
    pub fn induced(&self, nodes: &[usize]) -> MultiLayerNetwork {
        let t = Tensor3::from_fn([nodes.len(), nodes.len(), self.layers()], |a, b, l| {
            self.adjacency.get(nodes[a], nodes[b], l)
        });
        MultiLayerNetwork { adjacency: t }
    }

    pub(crate) fn from_tensor_unchecked(adjacency: Tensor3) -> Self {
        MultiLayerNetwork { adjacency }
    }
}

/// `P(i, j, l) = d_i · d_j · B_eff(c_i, c_j, l)`.
pub fn probability_tensor(p: &DcMsbmParams) -> Result<Tensor3> {
    let core = p.effective_core();
    let (labels, d) = (p.labels(), p.degrees());
    let n = p.n();
    let mut out = Tensor3::zeros([n, n, p.layers()]);
    for l in 0..p.layers() {
        for j in 0..n {
            for i in 0..n {
                let v = d[i] * d[j] * core.get(labels[i], labels[j], l);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::ProbabilityOutOfRange { index: (i, j, l), value: v });
                }
                out.set(i, j, l, v);
            }
        }
    }
    Ok(out)
}

/// Draws one Bernoulli variable per `(i, j, l)` with `i <= j` (diagonal
/// included) and mirrors it to `(j, i, l)`.
///
/// Row `i` of layer `l` uses its own substream, so the result depends only
/// on `(prob, seed)`.
pub fn sample_network(prob: &Tensor3, seed: u64) -> Result<MultiLayerNetwork> {
    let [n, n2, layers] = prob.dims();
    if n != n2 {
        return Err(mismatch(format_args!("n x n x L"), format_args!("{:?}", prob.dims())));
    }
    if prob.as_slice().iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(invalid("probabilities must lie in [0, 1]"));
    }
    if prob.semi_symmetry_defect() > 1e-12 {
        return Err(invalid("probability tensor must be symmetric in its first two modes"));
    }
    let mut a = Tensor3::zeros([n, n, layers]);
    for l in 0..layers {
        for i in 0..n {
            let mut rng = rng::stream(seed, &[purpose::SAMPLE, l as u64, i as u64]);
            for j in i..n {
                let p = prob.get(i, j, l);
                if rng.gen::<f64>() < p {
                    a.set(i, j, l, 1.0);
                    a.set(j, i, l, 1.0);
                }
            }
        }
    }
    Ok(MultiLayerNetwork::from_tensor_unchecked(a))
}

/// Synthetic parameters: labels uniform over `[K]` (redrawn until every
/// community is present), degrees `Unif(0.5, 1)`, and core entries
/// `0.5·1(k1 = k2) + b` with `b ~ Unif(0, 0.5)` drawn once per unordered
/// community pair and layer.
pub fn generate_params(n: usize, k: usize, layers: usize, seed: u64) -> Result<DcMsbmParams> {
    if k == 0 || n < k || layers == 0 {
        return Err(invalid(format_args!("need n >= K >= 1 and L >= 1, got n={n} K={k} L={layers}")));
    }
    let mut rng = rng::stream(seed, &[purpose::CORE]);
    let mut core = Tensor3::zeros([k, k, layers]);
    for l in 0..layers {
        for a in 0..k {
            for b in a..k {
                let base = if a == b { 0.5 } else { 0.0 };
                let v = base + rng.gen_range(0.0..0.5);
                core.set(a, b, l, v);
                core.set(b, a, l, v);
            }
        }
    }

    let mut rng = rng::stream(seed, &[purpose::LABELS]);
    let labels = loop {
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let mut seen = vec![false; k];
        labels.iter().for_each(|&c| seen[c] = true);
        if seen.iter().all(|&s| s) {
            break labels;
        }
    };

    let mut rng = rng::stream(seed, &[purpose::DEGREES]);
    let degrees: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.0)).collect();

    DcMsbmParams::new(labels, degrees, core, None)
}

/// Parameters from [`generate_params`] plus a network sampled from them.
pub fn generate_synthetic(
    n: usize,
    k: usize,
    layers: usize,
    seed: u64,
) -> Result<(MultiLayerNetwork, DcMsbmParams)> {
    let params = generate_params(n, k, layers, seed)?;
    let prob = probability_tensor(&params)?;
    let net = sample_network(&prob, seed)?;
    Ok((net, params))
}

/// `B ×₁ (DZ) ×₂ (DZ)` through mode products. Equal to
/// [`probability_tensor`] up to rounding; used as a cross-check.
pub fn probability_tensor_via_mode_products(p: &DcMsbmParams) -> Result<Tensor3> {
    let dz = p.degree_membership();
    p.effective_core().mode_product(&dz, Mode::One)?.mode_product(&dz, Mode::Two)
}
