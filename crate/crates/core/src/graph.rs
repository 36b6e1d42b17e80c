//! Time-sliced graph model.
//!
//! Every slot of a run shares one [`NodeRegistry`], so a node keeps the same
//! index in every slot and users absent from a slot show up as isolated
//! nodes. Weighted structure lives in a dense [`AdjacencyMatrix`]; the
//! unweighted [`BinaryGraph`] view is derived from it by thresholding.
//!
//! All reads of weights go through [`AdjacencyMatrix::weight`] and
//! [`AdjacencyMatrix::row`]. Those two methods are the seam a sparse backend
//! would have to provide.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Dense index of a node within a [`NodeRegistry`], `0..n`.
pub type NodeId = usize;

/// Bijection between external labels and dense node indices, in first-seen
/// order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeRegistry {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a registry from distinct labels. Duplicates are an error.
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut registry = Self::new();
        for label in labels {
            let label = label.into();
            if registry.index.contains_key(&label) {
                return Err(Error::DuplicateLabel(label));
            }
            registry.intern(&label);
        }
        Ok(registry)
    }

    /// Returns the id of `label`, assigning the next free id if unseen.
    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.labels.get(id).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Symmetric, zero-diagonal, non-negative weight matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    n: usize,
    w: Vec<f64>,
}

impl AdjacencyMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            w: vec![0.0; n * n],
        }
    }

    /// Validates and wraps a row-major `n * n` buffer.
    pub fn from_vec(n: usize, w: Vec<f64>) -> Result<Self> {
        if w.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for {n} nodes, found {}",
                n * n,
                w.len()
            )));
        }
        for i in 0..n {
            let d = w[i * n + i];
            if d != 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "non-zero diagonal {d} at node {i}"
                )));
            }
            for j in 0..n {
                let x = w[i * n + j];
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i},{j}) = {x} is not a finite non-negative weight"
                    )));
                }
                if x != w[j * n + i] {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetric entries at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { n, w })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        Self::from_vec(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: NodeId, j: NodeId) -> f64 {
        self.w[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: NodeId) -> &[f64] {
        &self.w[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|&x| x == 0.0)
    }

    /// Row sums (weighted strength of each node).
    pub fn strengths(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Applies `f` entrywise off the diagonal. The caller guarantees `f`
    /// maps finite non-negative values to finite non-negative values.
    pub(crate) fn map_pairwise(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    w[i * n + j] = f(self.weight(i, j), other.weight(i, j));
                }
            }
        }
        Self { n, w }
    }

    /// Reorders nodes so that old node `i` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[NodeId]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let n = self.n;
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                w[perm[i] * n + perm[j]] = self.weight(i, j);
            }
        }
        Ok(Self { n, w })
    }
}

fn check_permutation(perm: &[NodeId], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidConfig(format!("not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// One slot's weighted contact graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotGraph {
    pub slot: u64,
    pub adjacency: AdjacencyMatrix,
    pub registry: Arc<NodeRegistry>,
}

impl SlotGraph {
    pub fn new(slot: u64, adjacency: AdjacencyMatrix, registry: Arc<NodeRegistry>) -> Result<Self> {
        if adjacency.n() != registry.len() {
            return Err(Error::ShapeMismatch {
                expected: registry.len(),
                found: adjacency.n(),
            });
        }
        Ok(Self {
            slot,
            adjacency,
            registry,
        })
    }

    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    pub fn binarize(&self, threshold: f64) -> BinaryGraph {
        binarize(self, threshold)
    }
}

/// Unweighted undirected simple graph with sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryGraph {
    neighbors: Vec<Vec<NodeId>>,
}

impl BinaryGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            neighbors: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an undirected edge list. Self-loops and
    /// out-of-range endpoints are rejected; repeated edges collapse.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::InvalidNode { node: x, n });
                }
            }
            if u == v {
                return Err(Error::InvalidConfig(format!("self-loop at node {u}")));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { neighbors })
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.neighbors[v].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }
}

/// Unweighted view of `g`: edge `(i, j)` iff `w[i][j] > threshold`.
pub fn binarize(g: &SlotGraph, threshold: f64) -> BinaryGraph {
    let adjacency = &g.adjacency;
    let neighbors = (0..adjacency.n())
        .map(|i| {
            adjacency
                .row(i)
                .iter()
                .enumerate()
                .filter(|&(j, &w)| j != i && w > threshold)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    BinaryGraph { neighbors }
}

/// Hop distance between two nodes. `Unreachable` orders after every finite
/// distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Hops(u32),
    Unreachable,
}

impl Distance {
    pub fn hops(self) -> Option<u32> {
        match self {
            Distance::Hops(h) => Some(h),
            Distance::Unreachable => None,
        }
    }

    pub fn is_reachable(self) -> bool {
        matches!(self, Distance::Hops(_))
    }
}

/// Breadth-first hop distances from `source`.
pub fn shortest_path_lengths(g: &BinaryGraph, source: NodeId) -> Result<Vec<Distance>> {
    let n = g.n();
    if source >= n {
        return Err(Error::InvalidNode { node: source, n });
    }
    let mut dist = vec![Distance::Unreachable; n];
    dist[source] = Distance::Hops(0);
    let mut queue = VecDeque::from([(source, 0u32)]);
    while let Some((v, d)) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == Distance::Unreachable {
                dist[w] = Distance::Hops(d + 1);
                queue.push_back((w, d + 1));
            }
        }
    }
    Ok(dist)
}

/// Component label per node. Labels are numbered `0..` in order of each
/// component's lowest node id.
pub fn connected_components(g: &BinaryGraph) -> Vec<usize> {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    label
}
