//! Maximal clique enumeration (Bron-Kerbosch) and clique-based sentinel
//! detection.
//!
//! Both enumerators keep `P`, `X` and every `N(v)` as fixed-size bitsets and
//! run on an explicit stack, so recursion depth never touches the call
//! stack. The plain variant branches on every vertex of `P` in ascending
//! order; the pivoting variant skips the neighbors of a pivot chosen to
//! maximize `|N(u) ∩ P|`. Both produce the same canonical [`CliqueSet`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BinaryGraph, NodeId};

/// Fixed-capacity set of node ids backed by 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
struct NodeSet {
    words: Vec<u64>,
}

impl NodeSet {
    fn empty(n: usize) -> Self {
        Self {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    fn from_sorted(n: usize, members: &[NodeId]) -> Self {
        let mut s = Self::empty(n);
        for &v in members {
            s.insert(v);
        }
        s
    }

    #[inline]
    fn insert(&mut self, v: NodeId) {
        self.words[v / 64] |= 1 << (v % 64);
    }

    #[inline]
    fn remove(&mut self, v: NodeId) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn intersection(&self, other: &Self) -> Self {
        Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn difference(&self, other: &Self) -> Self {
        Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    fn intersection_len(&self, other: &Self) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    /// Removes and returns the smallest member.
    fn pop_first(&mut self) -> Option<NodeId> {
        for (i, w) in self.words.iter_mut().enumerate() {
            if *w != 0 {
                let bit = w.trailing_zeros() as usize;
                *w &= *w - 1;
                return Some(i * 64 + bit);
            }
        }
        None
    }

    fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }
}

/// Vertex set inducing a complete subgraph, members ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Clique {
    members: Vec<NodeId>,
}

impl Clique {
    /// Sorts and deduplicates `members`.
    pub fn new(mut members: Vec<NodeId>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// All maximal cliques of one slot, lexicographically ordered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSet {
    pub slot: u64,
    pub node_count: usize,
    pub cliques: Vec<Clique>,
    pub size_histogram: BTreeMap<usize, usize>,
}

impl CliqueSet {
    pub fn new(slot: u64, node_count: usize, mut cliques: Vec<Clique>) -> Self {
        cliques.sort_unstable();
        cliques.dedup();
        let mut size_histogram = BTreeMap::new();
        for c in &cliques {
            *size_histogram.entry(c.size()).or_insert(0) += 1;
        }
        Self {
            slot,
            node_count,
            cliques,
            size_histogram,
        }
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// Keeps only cliques with at least `min_size` members.
    pub fn with_min_size(&self, min_size: usize) -> Self {
        let kept = self
            .cliques
            .iter()
            .filter(|c| c.size() >= min_size)
            .cloned()
            .collect();
        Self::new(self.slot, self.node_count, kept)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueConfig {
    /// Enumeration aborts once more than this many maximal cliques are found.
    pub max_cliques: usize,
}

impl Default for CliqueConfig {
    fn default() -> Self {
        Self {
            max_cliques: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branching {
    Every,
    Pivot,
}

/// Plain Bron-Kerbosch: `R = X = ∅`, `P = V`, branch on each `v ∈ P`.
/// Isolated vertices come out as singleton cliques.
pub fn bron_kerbosch(g: &BinaryGraph, slot: u64, cfg: &CliqueConfig) -> Result<CliqueSet> {
    enumerate(g, slot, cfg, Branching::Every)
}

/// Bron-Kerbosch with Tomita-style pivoting. Pivot is the vertex of `P ∪ X`
/// with the most neighbors in `P`, lowest id on ties.
pub fn bron_kerbosch_pivot(g: &BinaryGraph, slot: u64, cfg: &CliqueConfig) -> Result<CliqueSet> {
    enumerate(g, slot, cfg, Branching::Pivot)
}

struct Frame {
    candidates: NodeSet,
    p: NodeSet,
    x: NodeSet,
    depth: usize,
}

fn enumerate(
    g: &BinaryGraph,
    slot: u64,
    cfg: &CliqueConfig,
    branching: Branching,
) -> Result<CliqueSet> {
    let n = g.n();
    let adj: Vec<NodeSet> = (0..n)
        .map(|v| NodeSet::from_sorted(n, g.neighbors(v)))
        .collect();
    let mut cliques = Vec::new();
    if n == 0 {
        return Ok(CliqueSet::new(slot, n, cliques));
    }

    let make_frame = |p: NodeSet, x: NodeSet, depth: usize| {
        let candidates = match branching {
            Branching::Every => p.clone(),
            Branching::Pivot => {
                let pivot = p
                    .iter()
                    .chain(x.iter())
                    .max_by_key(|&u| (adj[u].intersection_len(&p), std::cmp::Reverse(u)))
                    .expect("P is non-empty");
                p.difference(&adj[pivot])
            }
        };
        Frame {
            candidates,
            p,
            x,
            depth,
        }
    };

    let mut r: Vec<NodeId> = Vec::new();
    let mut stack = vec![make_frame(NodeSet::full(n), NodeSet::empty(n), 0)];
    while let Some(frame) = stack.last_mut() {
        let Some(v) = frame.candidates.pop_first() else {
            stack.pop();
            continue;
        };
        let child_p = frame.p.intersection(&adj[v]);
        let child_x = frame.x.intersection(&adj[v]);
        frame.p.remove(v);
        frame.x.insert(v);
        let depth = frame.depth;
        r.truncate(depth);
        r.push(v);

        if child_p.is_empty() {
            if child_x.is_empty() {
                if cliques.len() == cfg.max_cliques {
                    return Err(Error::CliqueLimit {
                        slot,
                        limit: cfg.max_cliques,
                    });
                }
                cliques.push(Clique::new(r.clone()));
            }
            continue;
        }
        stack.push(make_frame(child_p, child_x, depth + 1));
    }
    Ok(CliqueSet::new(slot, n, cliques))
}

pub fn is_clique(g: &BinaryGraph, members: &[NodeId]) -> bool {
    members
        .iter()
        .enumerate()
        .all(|(i, &u)| members[i + 1..].iter().all(|&v| u != v && g.has_edge(u, v)))
}

/// A clique is maximal when no outside vertex is adjacent to all members.
pub fn is_maximal_clique(g: &BinaryGraph, members: &[NodeId]) -> bool {
    is_clique(g, members)
        && (0..g.n())
            .filter(|v| !members.contains(v))
            .all(|v| members.iter().any(|&m| !g.has_edge(m, v)))
}

/// Pointwise sum of per-slot size histograms.
pub fn clique_histogram(sets: &[CliqueSet]) -> BTreeMap<usize, usize> {
    let mut total = BTreeMap::new();
    for set in sets {
        for (&size, &count) in &set.size_histogram {
            *total.entry(size).or_insert(0) += count;
        }
    }
    total
}

/// Clique participation and sentinel candidates for one slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentinelReport {
    pub slot: u64,
    /// Number of the slot's maximal cliques containing each node.
    pub participation: Vec<usize>,
    /// Nodes in at least a `phi` fraction of the slot's cliques, ascending.
    pub common_nodes: Vec<NodeId>,
    /// Nodes common in each of the last `window` consecutive slots.
    pub persistent_sentinels: Vec<NodeId>,
}

/// A node is common in a slot when it belongs to at least `phi * |cliques|`
/// of that slot's cliques; a slot without cliques has no common nodes.
/// `phi = 1` asks for nodes shared by every clique. A node is a persistent
/// sentinel once it has been common in `window` consecutive slots.
pub fn sentinel_nodes(sets: &[CliqueSet], phi: f64, window: usize) -> Result<Vec<SentinelReport>> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "phi {phi} must lie in (0, 1]"
        )));
    }
    if window == 0 {
        return Err(Error::InvalidConfig("window must be at least 1".into()));
    }
    let mut reports: Vec<SentinelReport> = Vec::with_capacity(sets.len());
    for (i, set) in sets.iter().enumerate() {
        let mut participation = vec![0usize; set.node_count];
        for clique in &set.cliques {
            for &v in clique.members() {
                participation[v] += 1;
            }
        }
        let common_nodes: Vec<NodeId> = if set.is_empty() {
            Vec::new()
        } else {
            let needed = phi * set.len() as f64;
            (0..set.node_count)
                .filter(|&v| participation[v] as f64 >= needed - 1e-9)
                .collect()
        };

        let persistent_sentinels = if i + 1 >= window
            && (i + 1 - window..i).all(|j| sets[j].slot + 1 == sets[j + 1].slot)
        {
            common_nodes
                .iter()
                .copied()
                .filter(|v| {
                    reports[i + 1 - window..i]
                        .iter()
                        .all(|r| r.common_nodes.binary_search(v).is_ok())
                })
                .collect()
        } else {
            Vec::new()
        };
        reports.push(SentinelReport {
            slot: set.slot,
            participation,
            common_nodes,
            persistent_sentinels,
        });
    }
    Ok(reports)
}
