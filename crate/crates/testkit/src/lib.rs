//! Independent reference implementations for the test suites.
//!
//! Nothing here depends on `tempocent-core`: every oracle works from plain
//! edge lists and nested `Vec`s, using exhaustive enumeration or a dense
//! linear-algebra route, so it can check the library without sharing code
//! paths with it.

use std::collections::{BTreeMap, HashSet};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

pub type Edge = (usize, usize);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p) edge list, `u < v`, lexicographic.
pub fn erdos_renyi(rng: &mut impl Rng, n: usize, p: f64) -> Vec<Edge> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Connected G(n, p): a random spanning tree plus extra G(n, p) edges.
pub fn connected_graph(rng: &mut impl Rng, n: usize, p: f64) -> Vec<Edge> {
    let mut set: HashSet<Edge> = erdos_renyi(rng, n, p).into_iter().collect();
    for v in 1..n {
        let u = rng.random_range(0..v);
        set.insert((u, v));
    }
    let mut edges: Vec<Edge> = set.into_iter().collect();
    edges.sort_unstable();
    edges
}

/// Symmetric zero-diagonal weights; each pair is non-zero with probability
/// `density`, drawn uniformly from `(0, max_weight]`.
pub fn random_weights(
    rng: &mut impl Rng,
    n: usize,
    density: f64,
    max_weight: f64,
) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                let x = max_weight * (1.0 - rng.random::<f64>());
                w[u][v] = x;
                w[v][u] = x;
            }
        }
    }
    w
}

pub fn edges_to_rows(n: usize, edges: &[Edge]) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; n]; n];
    for &(u, v) in edges {
        w[u][v] = 1.0;
        w[v][u] = 1.0;
    }
    w
}

fn adjacency_bits(n: usize, edges: &[Edge]) -> Vec<u64> {
    assert!(n <= 64);
    let mut adj = vec![0u64; n];
    for &(u, v) in edges {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    adj
}

/// Every subset of the vertex set, filtered for clique-ness and
/// maximality. Exponential; intended for `n <= 16`.
pub fn maximal_cliques_by_subsets(n: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    assert!(n <= 20, "subset oracle is exponential");
    let adj = adjacency_bits(n, edges);
    let is_clique = |mask: u64| {
        (0..n)
            .filter(|&v| mask >> v & 1 == 1)
            .all(|v| (mask & !(1 << v)) & !adj[v] == 0)
    };
    let mut out = Vec::new();
    for mask in 1u64..(1 << n) {
        if !is_clique(mask) {
            continue;
        }
        let extendable = (0..n).any(|v| mask >> v & 1 == 0 && mask & !adj[v] == 0);
        if !extendable {
            out.push((0..n).filter(|&v| mask >> v & 1 == 1).collect());
        }
    }
    out.sort();
    out
}

/// Every simple path from `s` to `t` by depth-first enumeration.
pub fn simple_paths(n: usize, edges: &[Edge], s: usize, t: usize) -> Vec<Vec<usize>> {
    let adj = adjacency_bits(n, edges);
    let mut out = Vec::new();
    let mut path = vec![s];
    fn walk(adj: &[u64], t: usize, path: &mut Vec<usize>, visited: u64, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if v == t {
            out.push(path.clone());
            return;
        }
        for w in 0..adj.len() {
            if adj[v] >> w & 1 == 1 && visited >> w & 1 == 0 {
                path.push(w);
                walk(adj, t, path, visited | 1 << w, out);
                path.pop();
            }
        }
    }
    walk(&adj, t, &mut path, 1 << s, &mut out);
    out
}

/// Shortest paths between `s` and `t`, chosen from all simple paths.
pub fn shortest_paths_by_enumeration(
    n: usize,
    edges: &[Edge],
    s: usize,
    t: usize,
) -> Vec<Vec<usize>> {
    let paths = simple_paths(n, edges, s, t);
    let Some(min) = paths.iter().map(Vec::len).min() else {
        return Vec::new();
    };
    paths.into_iter().filter(|p| p.len() == min).collect()
}

/// Hop distance from `s` to every node; `None` when unreachable.
pub fn distances_by_enumeration(n: usize, edges: &[Edge], s: usize) -> Vec<Option<usize>> {
    (0..n)
        .map(|t| {
            simple_paths(n, edges, s, t)
                .iter()
                .map(|p| p.len() - 1)
                .min()
        })
        .collect()
}

/// Betweenness as exact fractions: for each node, the list of
/// `(paths through node, total shortest paths)` per contributing pair.
pub fn betweenness_fractions(n: usize, edges: &[Edge]) -> Vec<Vec<(u64, u64)>> {
    let mut out = vec![Vec::new(); n];
    for s in 0..n {
        for t in s + 1..n {
            let paths = shortest_paths_by_enumeration(n, edges, s, t);
            if paths.is_empty() {
                continue;
            }
            let total = paths.len() as u64;
            for (v, fractions) in out.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                let through = paths
                    .iter()
                    .filter(|p| p[1..p.len() - 1].contains(&v))
                    .count() as u64;
                if through > 0 {
                    fractions.push((through, total));
                }
            }
        }
    }
    out
}

pub fn betweenness_by_enumeration(n: usize, edges: &[Edge]) -> Vec<f64> {
    betweenness_fractions(n, edges)
        .into_iter()
        .map(|fs| fs.into_iter().map(|(a, b)| a as f64 / b as f64).sum())
        .collect()
}

/// Reachability by repeated boolean squaring of `I + A`.
pub fn reachability_closure(n: usize, edges: &[Edge]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(u, v) in edges {
        m[u][v] = true;
        m[v][u] = true;
    }
    let mut steps = 1;
    while steps < n {
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).any(|k| m[i][k] && m[k][j]);
            }
        }
        m = next;
        steps *= 2;
    }
    m
}

/// Dominant eigenpair from a full symmetric eigendecomposition, sign fixed
/// so the vector sums to a non-negative value. Also returns the largest
/// magnitude among the remaining eigenvalues.
pub fn dominant_eigenpair(rows: &[Vec<f64>]) -> (f64, Vec<f64>, f64) {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let eig = SymmetricEigen::new(m);
    let top = (0..n)
        .max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .unwrap();
    let mut v: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let runner_up = (0..n)
        .filter(|&i| i != top)
        .map(|i| eig.eigenvalues[i].abs())
        .fold(0.0, f64::max);
    (eig.eigenvalues[top], v, runner_up)
}

/// Solves the PageRank stationarity equations directly:
/// `(I - d (M + D)) x = (1 - d)/n · 1`, where `M[i][j] = w[j][i] / s_j` and
/// `D[i][j] = 1/n` for dangling `j`.
pub fn pagerank_by_linear_solve(rows: &[Vec<f64>], damping: f64) -> Vec<f64> {
    let n = rows.len();
    let strengths: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    let transition = DMatrix::from_fn(n, n, |i, j| {
        if strengths[j] > 0.0 {
            rows[j][i] / strengths[j]
        } else {
            1.0 / n as f64
        }
    });
    let system = DMatrix::identity(n, n) - transition * damping;
    let rhs = DVector::from_element(n, (1.0 - damping) / n as f64);
    if damping < 1.0 {
        let x = system
            .lu()
            .solve(&rhs)
            .expect("non-singular for damping < 1");
        return x.iter().copied().collect();
    }
    // Singular at damping 1: replace one equation with sum(x) = 1.
    let mut system = system;
    let mut rhs = rhs;
    for j in 0..n {
        system[(0, j)] = 1.0;
    }
    rhs[0] = 1.0;
    system
        .lu()
        .solve(&rhs)
        .expect("irreducible chain")
        .iter()
        .copied()
        .collect()
}

/// Similarity counts as a map `(slot, i, j) -> count` with `i < j`, built
/// from the set of distinct `(pair, interval)` observations.
pub fn similarity_by_set_tally(
    events: &[(usize, usize, u64)],
    origin: u64,
    slot_duration: u64,
    interval_duration: u64,
) -> BTreeMap<(u64, usize, usize), u32> {
    let seen: HashSet<(usize, usize, u64)> = events
        .iter()
        .map(|&(a, b, ts)| (a.min(b), a.max(b), (ts - origin) / interval_duration))
        .collect();
    let mut out = BTreeMap::new();
    for (i, j, interval) in seen {
        let slot = interval * interval_duration / slot_duration;
        *out.entry((slot, i, j)).or_insert(0) += 1;
    }
    out
}

/// Validates `instance` against the subset of JSON Schema used by the
/// shipped schemas: `type`, `properties`, `required`,
/// `additionalProperties: false`, `items`, `enum`, `minimum`, `minItems`,
/// `$ref` into `definitions`.
pub fn validate_schema(schema: &Value, instance: &Value) -> Result<(), String> {
    validate_at(schema, schema, instance, "$")
}

fn validate_at(root: &Value, schema: &Value, v: &Value, path: &str) -> Result<(), String> {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r
            .strip_prefix("#/definitions/")
            .ok_or_else(|| format!("unsupported $ref {r}"))?;
        let target = root
            .get("definitions")
            .and_then(|d| d.get(name))
            .ok_or_else(|| format!("missing definition {name}"))?;
        return validate_at(root, target, v, path);
    }
    if let Some(ty) = schema.get("type") {
        let types: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("{path}: bad type keyword")),
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "number" => v.is_number(),
            "integer" => v.is_u64() || v.is_i64(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{path}: expected {types:?}, found {v}"));
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(v) {
            return Err(format!("{path}: {v} not in enum"));
        }
    }
    if let (Some(min), Some(x)) = (schema.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            return Err(format!("{path}: {x} below minimum {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        if let Some(req) = schema.get("required").and_then(Value::as_array) {
            for key in req.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    return Err(format!("{path}: missing required {key}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, value) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub) => validate_at(root, sub, value, &format!("{path}.{key}"))?,
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("{path}: unexpected property {key}"))
                }
                None => {}
            }
        }
    }
    if let Some(arr) = v.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < min {
                return Err(format!("{path}: fewer than {min} items"));
            }
        }
        if let Some(items) = schema.get("items") {
            for (i, item) in arr.iter().enumerate() {
                validate_at(root, items, item, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}
