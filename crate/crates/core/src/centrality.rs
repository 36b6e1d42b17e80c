//! Per-slot centrality measures.
//!
//! Degree, closeness and betweenness are computed on the binarized slot
//! graph (edge iff weight exceeds the threshold). Eigenvector and PageRank
//! consume the raw weights.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    binarize, connected_components, AdjacencyMatrix, BinaryGraph, NodeId, SlotGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityMeasure {
    Degree,
    Closeness,
    Betweenness,
    Eigenvector,
    PageRank,
}

impl CentralityMeasure {
    pub const ALL: [CentralityMeasure; 5] = [
        CentralityMeasure::Degree,
        CentralityMeasure::Closeness,
        CentralityMeasure::Betweenness,
        CentralityMeasure::Eigenvector,
        CentralityMeasure::PageRank,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CentralityMeasure::Degree => "degree",
            CentralityMeasure::Closeness => "closeness",
            CentralityMeasure::Betweenness => "betweenness",
            CentralityMeasure::Eigenvector => "eigenvector",
            CentralityMeasure::PageRank => "pagerank",
        }
    }

    /// Whether the measure reads the binarized graph rather than weights.
    pub fn is_topological(self) -> bool {
        matches!(
            self,
            CentralityMeasure::Degree
                | CentralityMeasure::Closeness
                | CentralityMeasure::Betweenness
        )
    }
}

impl fmt::Display for CentralityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CentralityMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown centrality measure {s:?}")))
    }
}

/// Stopping rule for the eigenvector and PageRank iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIterationConfig {
    pub max_iters: usize,
    pub tolerance: f64,
}

impl Default for PowerIterationConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            tolerance: 1e-10,
        }
    }
}

impl PowerIterationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Parameters shared by all measures; each measure reads what it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams {
    pub threshold: f64,
    pub damping: f64,
    pub power: PowerIterationConfig,
}

impl Default for MeasureParams {
    fn default() -> Self {
        Self {
            threshold: 0.0,
            damping: 0.85,
            power: PowerIterationConfig::default(),
        }
    }
}

/// Per-measure side information.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Closeness: number of other nodes each node reaches.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reachable: Option<Vec<usize>>,
    /// Eigenvector: dominant eigenvalue (Rayleigh quotient at convergence).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// Eigenvector: the adjacency was all zero, scores are all zero.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub zero_adjacency: bool,
    /// Eigenvector: more than one component has edges, so the scores
    /// concentrate on the component(s) with the largest spectral radius.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub multiple_components: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityResult {
    pub slot: u64,
    pub measure: CentralityMeasure,
    /// Smoothing weight used, `None` for plain per-slot centrality.
    pub alpha: Option<f64>,
    pub scores: Vec<f64>,
    /// Node ids by descending score, ties by ascending id.
    pub ranking: Vec<NodeId>,
    pub diagnostics: Diagnostics,
}

impl CentralityResult {
    fn new(
        slot: u64,
        measure: CentralityMeasure,
        scores: Vec<f64>,
        diagnostics: Diagnostics,
    ) -> Self {
        let ranking = rank_descending(&scores);
        Self {
            slot,
            measure,
            alpha: None,
            scores,
            ranking,
            diagnostics,
        }
    }

    /// 1-based rank of every node, aligned with `scores`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.scores.len()];
        for (pos, &v) in self.ranking.iter().enumerate() {
            ranks[v] = pos + 1;
        }
        ranks
    }

    /// Scores divided by the slot maximum; all-zero scores stay zero.
    pub fn max_normalized(&self) -> Vec<f64> {
        let max = self.scores.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            self.scores.iter().map(|s| s / max).collect()
        } else {
            self.scores.clone()
        }
    }
}

pub fn rank_descending(scores: &[f64]) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| match scores[b].total_cmp(&scores[a]) {
        Ordering::Equal => a.cmp(&b),
        other => other,
    });
    order
}

/// Dispatches to the requested measure.
pub fn compute(
    g: &SlotGraph,
    measure: CentralityMeasure,
    params: &MeasureParams,
) -> Result<CentralityResult> {
    match measure {
        CentralityMeasure::Degree => Ok(degree_centrality(g, params.threshold)),
        CentralityMeasure::Closeness => Ok(closeness_centrality(g, params.threshold)),
        CentralityMeasure::Betweenness => Ok(betweenness_centrality(g, params.threshold)),
        CentralityMeasure::Eigenvector => eigenvector_centrality(g, &params.power),
        CentralityMeasure::PageRank => pagerank_centrality(g, params.damping, &params.power),
    }
}

pub fn degree_centrality(g: &SlotGraph, threshold: f64) -> CentralityResult {
    let scores = degree_scores(&binarize(g, threshold));
    CentralityResult::new(
        g.slot,
        CentralityMeasure::Degree,
        scores,
        Diagnostics::default(),
    )
}

pub fn degree_scores(g: &BinaryGraph) -> Vec<f64> {
    (0..g.n()).map(|v| g.degree(v) as f64).collect()
}

/// Reciprocal of the summed hop distance to every reachable node; 0 for
/// isolated nodes. The reachable counts land in `diagnostics.reachable`.
pub fn closeness_centrality(g: &SlotGraph, threshold: f64) -> CentralityResult {
    let (scores, reachable) = closeness_scores(&binarize(g, threshold));
    CentralityResult::new(
        g.slot,
        CentralityMeasure::Closeness,
        scores,
        Diagnostics {
            reachable: Some(reachable),
            ..Diagnostics::default()
        },
    )
}

pub fn closeness_scores(g: &BinaryGraph) -> (Vec<f64>, Vec<usize>) {
    (0..g.n())
        .into_par_iter()
        .map(|v| {
            let (total, reached) = bfs_distance_sum(g, v);
            let score = if total == 0 { 0.0 } else { 1.0 / total as f64 };
            (score, reached)
        })
        .unzip()
}

fn bfs_distance_sum(g: &BinaryGraph, source: NodeId) -> (u64, usize) {
    let mut dist = vec![u32::MAX; g.n()];
    dist[source] = 0;
    let mut queue = std::collections::VecDeque::from([source]);
    let (mut total, mut reached) = (0u64, 0usize);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                total += u64::from(dist[w]);
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    (total, reached)
}

/// Sum over unordered pairs of the fraction of shortest paths that pass
/// through each node as an interior vertex.
pub fn betweenness_centrality(g: &SlotGraph, threshold: f64) -> CentralityResult {
    let scores = betweenness_scores(&binarize(g, threshold));
    CentralityResult::new(
        g.slot,
        CentralityMeasure::Betweenness,
        scores,
        Diagnostics::default(),
    )
}

pub fn betweenness_scores(g: &BinaryGraph) -> Vec<f64> {
    let n = g.n();
    let partials: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| single_source_dependencies(g, s))
        .collect();
    let mut scores = vec![0.0; n];
    for partial in &partials {
        for (acc, d) in scores.iter_mut().zip(partial) {
            *acc += d;
        }
    }
    // Each unordered pair was visited from both endpoints.
    for s in &mut scores {
        *s /= 2.0;
    }
    scores
}

/// Brandes' dependency accumulation from one source over its BFS DAG.
fn single_source_dependencies(g: &BinaryGraph, source: NodeId) -> Vec<f64> {
    let n = g.n();
    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![u32::MAX; n];
    let mut delta = vec![0.0f64; n];

    sigma[source] = 1.0;
    dist[source] = 0;
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in g.neighbors(v) {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    while let Some(w) = order.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[source] = 0.0;
    delta
}

/// Outcome of [`eigenvector_scores`].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub scores: Vec<f64>,
    pub eigenvalue: f64,
    pub iterations: usize,
}

/// Iteration budget exhausted; carries the last L∞ step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotConverged {
    pub iterations: usize,
    pub residual: f64,
}

/// Dominant non-negative eigenvector of the weighted adjacency, unit L2
/// norm. An all-zero adjacency yields all-zero scores with the
/// `zero_adjacency` flag set.
pub fn eigenvector_centrality(
    g: &SlotGraph,
    cfg: &PowerIterationConfig,
) -> Result<CentralityResult> {
    cfg.validate()?;
    let a = &g.adjacency;
    let mut diagnostics = Diagnostics::default();
    let scores = if a.is_zero() {
        diagnostics.zero_adjacency = true;
        vec![0.0; a.n()]
    } else {
        let sol = eigenvector_scores(a, cfg).map_err(|e| Error::NoConvergence {
            measure: CentralityMeasure::Eigenvector,
            slot: g.slot,
            iterations: e.iterations,
            residual: e.residual,
        })?;
        diagnostics.eigenvalue = Some(sol.eigenvalue);
        diagnostics.iterations = Some(sol.iterations);
        diagnostics.multiple_components = nontrivial_components(&binarize(g, 0.0)) > 1;
        sol.scores
    };
    Ok(CentralityResult::new(
        g.slot,
        CentralityMeasure::Eigenvector,
        scores,
        diagnostics,
    ))
}

fn nontrivial_components(g: &BinaryGraph) -> usize {
    let labels = connected_components(g);
    let mut sizes = vec![0usize; g.n()];
    for l in labels {
        sizes[l] += 1;
    }
    sizes.iter().filter(|&&s| s > 1).count()
}

/// Shifted power iteration `x <- (A + sI) x / ||(A + sI) x||` from the
/// uniform vector over non-isolated nodes.
///
/// The shift leaves the eigenvectors unchanged and makes the Perron root
/// strictly dominant in magnitude, so bipartite graphs (eigenvalues `±λ`)
/// converge instead of oscillating. It is bounded by half of a lower bound
/// on `λ`, so it costs at most a constant factor in convergence speed.
/// Isolated nodes start at zero and stay exactly zero.
pub fn eigenvector_scores(
    a: &AdjacencyMatrix,
    cfg: &PowerIterationConfig,
) -> Result<EigenSolution, NotConverged> {
    let n = a.n();
    let strengths = a.strengths();
    let active: Vec<bool> = strengths.iter().map(|&s| s > 0.0).collect();
    let n_active = active.iter().filter(|&&b| b).count();
    if n_active == 0 {
        return Ok(EigenSolution {
            scores: vec![0.0; n],
            eigenvalue: 0.0,
            iterations: 0,
        });
    }

    let mean_strength = strengths.iter().sum::<f64>() / n_active as f64;
    let max_row_norm = (0..n)
        .map(|i| a.row(i).iter().map(|w| w * w).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let shift = 0.5 * mean_strength.max(max_row_norm);

    let start = 1.0 / (n_active as f64).sqrt();
    let mut x: Vec<f64> = active
        .iter()
        .map(|&on| if on { start } else { 0.0 })
        .collect();
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iters {
        for (i, out) in next.iter_mut().enumerate() {
            *out = dot(a.row(i), &x) + shift * x[i];
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut next {
            *v /= norm;
        }
        residual = x
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if residual < cfg.tolerance {
            let eigenvalue = (0..n).map(|i| x[i] * dot(a.row(i), &x)).sum();
            return Ok(EigenSolution {
                scores: x,
                eigenvalue,
                iterations: iter,
            });
        }
    }
    Err(NotConverged {
        iterations: cfg.max_iters,
        residual,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Weighted PageRank. Each node passes `damping` of its mass to neighbors
/// in proportion to edge weight; zero-strength nodes spread theirs over all
/// nodes. `damping = 1` is the undamped fixed point.
pub fn pagerank_centrality(
    g: &SlotGraph,
    damping: f64,
    cfg: &PowerIterationConfig,
) -> Result<CentralityResult> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&damping) {
        return Err(Error::InvalidConfig(format!(
            "damping {damping} must lie in [0, 1]"
        )));
    }
    let (scores, iterations) =
        pagerank_scores(&g.adjacency, damping, cfg).map_err(|e| Error::NoConvergence {
            measure: CentralityMeasure::PageRank,
            slot: g.slot,
            iterations: e.iterations,
            residual: e.residual,
        })?;
    Ok(CentralityResult::new(
        g.slot,
        CentralityMeasure::PageRank,
        scores,
        Diagnostics {
            iterations: Some(iterations),
            ..Diagnostics::default()
        },
    ))
}

/// Returns the scores and the number of iterations; stops once the L1 step
/// falls below the tolerance.
pub fn pagerank_scores(
    a: &AdjacencyMatrix,
    damping: f64,
    cfg: &PowerIterationConfig,
) -> Result<(Vec<f64>, usize), NotConverged> {
    let n = a.n();
    if n == 0 {
        return Ok((Vec::new(), 0));
    }
    let strengths = a.strengths();
    let uniform = 1.0 / n as f64;
    let teleport = (1.0 - damping) * uniform;
    let mut pr = vec![uniform; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iters {
        let dangling: f64 = pr
            .iter()
            .zip(&strengths)
            .filter(|(_, &s)| s == 0.0)
            .map(|(p, _)| p)
            .sum();
        next.fill(0.0);
        for (j, &s) in strengths.iter().enumerate() {
            if s > 0.0 {
                let share = pr[j] / s;
                for (out, &w) in next.iter_mut().zip(a.row(j)) {
                    *out += share * w;
                }
            }
        }
        let base = teleport + damping * dangling * uniform;
        for v in &mut next {
            *v = base + damping * *v;
        }
        residual = pr.iter().zip(&next).map(|(p, q)| (p - q).abs()).sum();
        std::mem::swap(&mut pr, &mut next);
        if residual < cfg.tolerance {
            return Ok((pr, iter));
        }
    }
    Err(NotConverged {
        iterations: cfg.max_iters,
        residual,
    })
}
