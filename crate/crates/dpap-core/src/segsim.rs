//! Similarity composer for image-segmentation inputs: a planar graph of
//! superpixels with mean colors on the nodes and boundary-detector responses
//! on the edges. Color agreement gives a direct appearance term; boundary
//! responses become edge lengths, and the all-pairs shortest-path distance
//! gives a contour term (crossing strong boundaries is expensive no matter
//! the route). The two terms add, and a common scale maps the result onto a
//! clustering objective.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::grid::SquareGrid;
use crate::similarity::SimilarityModel;

/// Boundary evidence for one edge, as supplied by the caller.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeResponses {
    /// Raw detector samples along the shared boundary, each in [0, 1].
    Samples(Vec<f64>),
    /// A precomputed mean response in [0, 1].
    Mean(f64),
}

/// One undirected adjacency between superpixels `i` and `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpixelEdge {
    pub i: usize,
    pub j: usize,
    /// Mean boundary response; `None` when no samples were provided, in
    /// which case the edge carries no evidence and is skipped for paths.
    pub mean_response: Option<f64>,
}

/// A validated superpixel adjacency graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpixelGraph {
    n: usize,
    mean_color: Vec<[f64; 3]>,
    edges: Vec<SuperpixelEdge>,
}

impl SuperpixelGraph {
    /// Build and validate a graph. Rejects self-loops, out-of-range
    /// endpoints, duplicate undirected pairs, responses outside [0, 1], and
    /// non-finite colors.
    pub fn new(
        mean_color: Vec<[f64; 3]>,
        edges: Vec<(usize, usize, EdgeResponses)>,
    ) -> Result<Self> {
        let n = mean_color.len();
        if n == 0 {
            return Err(Error::BadGraph { detail: "need at least one superpixel".into() });
        }
        for (i, c) in mean_color.iter().enumerate() {
            if !c.iter().all(|v| v.is_finite()) {
                return Err(Error::BadGraph { detail: format!("color of node {i} is not finite") });
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (i, j, responses) in edges {
            if i == j {
                return Err(Error::BadGraph { detail: format!("self-loop on node {i}") });
            }
            if i >= n || j >= n {
                return Err(Error::BadGraph { detail: format!("edge ({i}, {j}) out of range for {n} nodes") });
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(Error::BadGraph { detail: format!("duplicate edge ({}, {})", key.0, key.1) });
            }
            let mean_response = match responses {
                EdgeResponses::Mean(m) => {
                    if !(0.0..=1.0).contains(&m) {
                        return Err(Error::BadGraph { detail: format!("edge ({i}, {j}) mean response {m} outside [0, 1]") });
                    }
                    Some(m)
                }
                EdgeResponses::Samples(samples) => {
                    if samples.is_empty() {
                        None
                    } else {
                        for &s in &samples {
                            if !(0.0..=1.0).contains(&s) {
                                return Err(Error::BadGraph { detail: format!("edge ({i}, {j}) response {s} outside [0, 1]") });
                            }
                        }
                        Some(samples.iter().sum::<f64>() / samples.len() as f64)
                    }
                }
            };
            out.push(SuperpixelEdge { i, j, mean_response });
        }
        Ok(SuperpixelGraph { n, mean_color, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean_color(&self) -> &[[f64; 3]] {
        &self.mean_color
    }

    pub fn edges(&self) -> &[SuperpixelEdge] {
        &self.edges
    }
}

/// Composer settings. `None` for a strength asks for the automatic choice:
/// the reciprocal of the standard deviation of that term's finite
/// off-diagonal values at unit strength (1 when that deviation is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct SegConfig {
    pub tau_color: Option<f64>,
    pub tau_edge: Option<f64>,
    /// Diagonal value before scaling (the exemplar preference).
    pub self_sim: f64,
    /// Overall multiplier applied to every entry.
    pub scale: f64,
}

impl Default for SegConfig {
    fn default() -> Self {
        SegConfig { tau_color: None, tau_edge: None, self_sim: 0.0, scale: 1.0 }
    }
}

/// Appearance term: `-tau * ||color_i - color_j||^2`, zero diagonal.
pub fn color_similarity(graph: &SuperpixelGraph, tau: f64) -> SquareGrid {
    let n = graph.n();
    let mut grid = SquareGrid::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d2: f64 = graph.mean_color[i]
                .iter()
                .zip(&graph.mean_color[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            grid.set(i, j, -tau * d2);
        }
    }
    grid
}

#[derive(Debug)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the smallest distance.
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], src: usize) -> Vec<f64> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem { dist: 0.0, node: src });
    while let Some(HeapItem { dist: d, node: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let cand = d + w;
            if cand < dist[v] {
                dist[v] = cand;
                heap.push(HeapItem { dist: cand, node: v });
            }
        }
    }
    dist
}

/// Contour term: `-shortest_path_distance(i, j)` where each edge costs
/// `tau * mean_response`; zero diagonal, negative infinity for disconnected
/// pairs. Edges without responses carry no evidence and are omitted. The
/// result is exactly symmetric: each unordered pair is filled from the
/// lower-index source's run (the two directions agree mathematically but
/// could differ in the last bit through rounding).
pub fn shortest_path_similarity(graph: &SuperpixelGraph, tau: f64) -> Result<SquareGrid> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::BadConfig { detail: format!("edge strength must be non-negative, got {tau}") });
    }
    let n = graph.n();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in graph.edges() {
        let Some(m) = e.mean_response else { continue };
        let w = tau * m;
        if w < 0.0 {
            return Err(Error::NegativeEdgeWeight { i: e.i, j: e.j });
        }
        adj[e.i].push((e.j, w));
        adj[e.j].push((e.i, w));
    }
    let mut grid = SquareGrid::zeros(n);
    for src in 0..n {
        let dist = dijkstra(&adj, src);
        for (dst, &d) in dist.iter().enumerate().skip(src + 1) {
            let v = if d.is_finite() { -d } else { f64::NEG_INFINITY };
            grid.set(src, dst, v);
            grid.set(dst, src, v);
        }
    }
    Ok(grid)
}

/// Population standard deviation of the finite off-diagonal entries of a
/// unit-strength term; 1 when there are no such entries or they are all equal.
fn off_diagonal_sd(grid: &SquareGrid) -> f64 {
    let n = grid.n();
    let mut vals = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && grid.at(i, j).is_finite() {
                vals.push(grid.at(i, j));
            }
        }
    }
    if vals.is_empty() {
        return 1.0;
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
    let sd = var.sqrt();
    if sd > 0.0 {
        sd
    } else {
        1.0
    }
}

/// Automatic strengths: one over the spread of each term at unit strength,
/// so both terms land on comparable scales before they are added.
pub fn auto_taus(graph: &SuperpixelGraph) -> Result<(f64, f64)> {
    let tau_color = 1.0 / off_diagonal_sd(&color_similarity(graph, 1.0));
    let tau_edge = 1.0 / off_diagonal_sd(&shortest_path_similarity(graph, 1.0)?);
    Ok((tau_color, tau_edge))
}

/// Compose the full similarity matrix: off-diagonal entries are
/// `scale * (color term + contour term)` (negative infinity when the contour
/// term is), and every diagonal entry is `scale * self_sim`.
pub fn compose(graph: &SuperpixelGraph, cfg: &SegConfig) -> Result<SimilarityModel> {
    for (name, tau) in [("color", cfg.tau_color), ("edge", cfg.tau_edge)] {
        if let Some(t) = tau {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::BadConfig { detail: format!("{name} strength must be positive, got {t}") });
            }
        }
    }
    if !cfg.self_sim.is_finite() {
        return Err(Error::BadConfig { detail: format!("self similarity must be finite, got {}", cfg.self_sim) });
    }
    if !(cfg.scale.is_finite() && cfg.scale > 0.0) {
        return Err(Error::BadConfig { detail: format!("scale must be positive, got {}", cfg.scale) });
    }

    let (auto_color, auto_edge) = match (cfg.tau_color, cfg.tau_edge) {
        (Some(_), Some(_)) => (1.0, 1.0), // unused
        _ => auto_taus(graph)?,
    };
    let tau_color = cfg.tau_color.unwrap_or(auto_color);
    let tau_edge = cfg.tau_edge.unwrap_or(auto_edge);

    let color = color_similarity(graph, tau_color);
    let contour = shortest_path_similarity(graph, tau_edge)?;
    let n = graph.n();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = if i == j {
                cfg.scale * cfg.self_sim
            } else {
                let sum = color.at(i, j) + contour.at(i, j);
                if sum == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    cfg.scale * sum
                }
            };
        }
    }
    SimilarityModel::from_flat(n, data)
}
