//! Layered edge lists and giant-component preprocessing.
//!
//! ```text
//! layers 3 nodes 5
//! 1 1 2
//! 3 4 4
//! ```
//!
//! The header gives the layer and node counts; each following line is an
//! undirected edge `layer i j` with 1-based ids. Self-loops are allowed.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use flipnet_core::MultiLayerNetwork;

use crate::error::{parse_error, Result};
use crate::formats::{content_lines, field, id, read_text, write_text};

/// Per-layer undirected edges, 1-based ids with `i <= j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredEdgeList {
    pub n: usize,
    pub layers: usize,
    pub edges: Vec<Vec<(usize, usize)>>,
}

impl LayeredEdgeList {
    pub fn from_network(net: &MultiLayerNetwork) -> Self {
        let mut edges = vec![Vec::new(); net.layers()];
        for (l, i, j) in net.edges() {
            edges[l].push((i + 1, j + 1));
        }
        LayeredEdgeList { n: net.n(), layers: net.layers(), edges }
    }

    pub fn to_network(&self) -> MultiLayerNetwork {
        let mut net = MultiLayerNetwork::empty(self.n, self.layers);
        for (l, pairs) in self.edges.iter().enumerate() {
            for &(i, j) in pairs {
                net.set_edge(i - 1, j - 1, l, true);
            }
        }
        net
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Merge repeated edges (either orientation) instead of rejecting them.
    pub allow_duplicates: bool,
}

pub fn parse_layered_edgelist(text: &str, src: &str, opts: ReadOptions) -> Result<LayeredEdgeList> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_error(src, 0, "missing `layers L nodes n` header"))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 4 || tok[0] != "layers" || tok[2] != "nodes" {
        return Err(parse_error(src, hline, "expected `layers L nodes n`"));
    }
    let layers: usize = field(Some(tok[1]), "layer count", src, hline)?;
    let n: usize = field(Some(tok[3]), "node count", src, hline)?;

    let mut edges = vec![Vec::new(); layers];
    let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();
    for (line, l) in lines {
        let mut it = l.split_whitespace();
        let layer = id(it.next(), "layer", layers, src, line)?;
        let a = id(it.next(), "node", n, src, line)? + 1;
        let b = id(it.next(), "node", n, src, line)? + 1;
        if let Some(extra) = it.next() {
            return Err(parse_error(src, line, format!("unexpected field `{extra}`")));
        }
        let (i, j) = (a.min(b), a.max(b));
        if !seen.insert((layer, i, j)) {
            if opts.allow_duplicates {
                continue;
            }
            return Err(parse_error(src, line, format!("edge {i}-{j} repeated in layer {}", layer + 1)));
        }
        edges[layer].push((i, j));
    }
    for pairs in &mut edges {
        pairs.sort_unstable();
    }
    Ok(LayeredEdgeList { n, layers, edges })
}

pub fn format_layered_edgelist(list: &LayeredEdgeList) -> String {
    let mut s = format!("layers {} nodes {}\n", list.layers, list.n);
    for (l, pairs) in list.edges.iter().enumerate() {
        for (i, j) in pairs {
            let _ = writeln!(s, "{} {i} {j}", l + 1);
        }
    }
    s
}

pub fn read_layered_edgelist(path: &Path) -> Result<MultiLayerNetwork> {
    read_layered_edgelist_with(path, ReadOptions::default())
}

pub fn read_layered_edgelist_with(path: &Path, opts: ReadOptions) -> Result<MultiLayerNetwork> {
    Ok(read_edgelist_file(path, opts)?.to_network())
}

pub fn write_layered_edgelist(path: &Path, net: &MultiLayerNetwork) -> Result<()> {
    write_text(path, &format_layered_edgelist(&LayeredEdgeList::from_network(net)))
}

impl LayeredEdgeList {
    /// 0-based nodes of the largest connected component of `layer`, sorted.
    /// Among components of equal size the one containing the smallest id
    /// wins.
    pub fn giant_component(&self, layer: usize) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges[layer] {
            if i != j {
                adj[i - 1].push(j - 1);
                adj[j - 1].push(i - 1);
            }
        }
        let mut visited = vec![false; self.n];
        let mut best: Vec<usize> = Vec::new();
        for start in 0..self.n {
            if visited[start] {
                continue;
            }
            visited[start] = true;
            let mut members = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if !visited[v] {
                        visited[v] = true;
                        members.push(v);
                        queue.push_back(v);
                    }
                }
            }
            // Components are discovered in order of their smallest id.
            if members.len() > best.len() {
                best = members;
            }
        }
        best.sort_unstable();
        best
    }

    /// Edges among `nodes` (0-based, sorted, distinct), renumbered
    /// `1..=nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> LayeredEdgeList {
        let mut new_id = vec![0usize; self.n];
        for (k, &v) in nodes.iter().enumerate() {
            new_id[v] = k + 1;
        }
        let edges = self
            .edges
            .iter()
            .map(|pairs| {
                let mut out: Vec<(usize, usize)> = pairs
                    .iter()
                    .filter_map(|&(i, j)| {
                        let (a, b) = (new_id[i - 1], new_id[j - 1]);
                        (a > 0 && b > 0).then(|| (a.min(b), a.max(b)))
                    })
                    .collect();
                out.sort_unstable();
                out
            })
            .collect();
        LayeredEdgeList { n: nodes.len(), layers: self.layers, edges }
    }

    /// Nodes (0-based) in the giant component of every layer, and the edge
    /// list induced on them.
    pub fn giant_component_intersection(&self) -> (Vec<usize>, LayeredEdgeList) {
        let mut keep = vec![self.layers > 0; self.n];
        for l in 0..self.layers {
            let mut in_giant = vec![false; self.n];
            for i in self.giant_component(l) {
                in_giant[i] = true;
            }
            keep.iter_mut().zip(&in_giant).for_each(|(k, g)| *k &= g);
        }
        let nodes: Vec<usize> = (0..self.n).filter(|&i| keep[i]).collect();
        let sub = self.induced(&nodes);
        (nodes, sub)
    }
}

/// Nodes (0-based) in the giant connected component of every layer and the
/// network induced on them. An empty intersection gives an empty network.
pub fn giant_component_intersection(net: &MultiLayerNetwork) -> (Vec<usize>, MultiLayerNetwork) {
    let (nodes, sub) = LayeredEdgeList::from_network(net).giant_component_intersection();
    (nodes, sub.to_network())
}

pub fn read_edgelist_file(path: &Path, opts: ReadOptions) -> Result<LayeredEdgeList> {
    parse_layered_edgelist(&read_text(path)?, &path.display().to_string(), opts)
}
