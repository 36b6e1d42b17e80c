use std::sync::Arc;

use proptest::prelude::*;
use tempocent_core::centrality::{
    compute, rank_descending, CentralityMeasure, CentralityResult, MeasureParams,
};
use tempocent_core::cliques::{
    bron_kerbosch, bron_kerbosch_pivot, is_clique, is_maximal_clique, CliqueConfig,
};
use tempocent_core::evolutionary::{smooth_adjacency, SmoothingConfig};
use tempocent_core::graph::{
    binarize, shortest_path_lengths, AdjacencyMatrix, BinaryGraph, Distance, NodeRegistry,
    SlotGraph,
};
use tempocent_core::ingest::{build_similarity, ContactEvent, SlotConfig};
use tempocent_core::Error;

/// Symmetric weight matrix with roughly half the pairs connected.
fn weights(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(prop_oneof![Just(0.0), 0.1f64..10.0], n * (n - 1) / 2).prop_map(
            move |upper| {
                let mut rows = vec![vec![0.0; n]; n];
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        rows[i][j] = upper[k];
                        rows[j][i] = upper[k];
                        k += 1;
                    }
                }
                rows
            },
        )
    })
}

fn graph(rows: &[Vec<f64>]) -> SlotGraph {
    let reg = NodeRegistry::from_labels((0..rows.len()).map(|i| i.to_string())).unwrap();
    SlotGraph::new(0, AdjacencyMatrix::from_rows(rows).unwrap(), Arc::new(reg)).unwrap()
}

fn scaled(rows: &[Vec<f64>], c: f64) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().map(|w| w * c).collect())
        .collect()
}

fn params() -> MeasureParams {
    MeasureParams::default()
}

/// `None` when power iteration runs out of iterations, which random graphs
/// with near-tied dominant eigenvalues can legitimately cause.
fn scored(g: &SlotGraph, m: CentralityMeasure, p: &MeasureParams) -> Option<CentralityResult> {
    match compute(g, m, p) {
        Ok(r) => Some(r),
        Err(Error::NoConvergence { .. }) => None,
        Err(e) => panic!("{m}: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn thresholding_is_monotone(rows in weights(9), t1 in 0.0f64..5.0, dt in 0.0f64..5.0) {
        let g = graph(&rows);
        let loose = binarize(&g, t1);
        let strict = binarize(&g, t1 + dt);
        for (u, v) in strict.edges() {
            prop_assert!(loose.has_edge(u, v));
        }
        for u in 0..loose.n() {
            prop_assert!(!loose.has_edge(u, u));
            for &v in loose.neighbors(u) {
                prop_assert!(loose.has_edge(v, u));
            }
        }
    }

    #[test]
    fn distances_are_symmetric_and_one_lipschitz(rows in weights(10)) {
        let g = binarize(&graph(&rows), 0.0);
        let all: Vec<Vec<Distance>> = (0..g.n()).map(|s| shortest_path_lengths(&g, s).unwrap()).collect();
        for s in 0..g.n() {
            prop_assert_eq!(all[s][s], Distance::Hops(0));
            for (u, v) in g.edges() {
                for (a, b) in [(u, v), (v, u)] {
                    if let Distance::Hops(du) = all[s][a] {
                        prop_assert!(all[s][b] <= Distance::Hops(du + 1));
                    }
                }
            }
            for v in 0..g.n() {
                prop_assert_eq!(all[s][v], all[v][s]);
            }
        }
    }

    #[test]
    fn scores_are_finite_nonnegative_and_ranked(rows in weights(10)) {
        let g = graph(&rows);
        for m in CentralityMeasure::ALL {
            let Some(r) = scored(&g, m, &params()) else { continue };
            prop_assert_eq!(r.scores.len(), rows.len());
            prop_assert!(r.scores.iter().all(|s| s.is_finite() && *s >= 0.0));
            let mut sorted = r.ranking.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..rows.len()).collect::<Vec<_>>());
            for w in r.ranking.windows(2) {
                let (a, b) = (r.scores[w[0]], r.scores[w[1]]);
                prop_assert!(a > b || (a == b && w[0] < w[1]));
            }
        }
    }

    #[test]
    fn topological_measures_ignore_weight_scale(rows in weights(9), c in 0.01f64..100.0) {
        let (a, b) = (graph(&rows), graph(&scaled(&rows, c)));
        for m in CentralityMeasure::ALL.into_iter().filter(|m| m.is_topological()) {
            prop_assert_eq!(compute(&a, m, &params()).unwrap().scores, compute(&b, m, &params()).unwrap().scores);
        }
    }

    #[test]
    fn eigenvector_is_scale_invariant(rows in weights(9), k in -6i32..6, c in 0.01f64..100.0) {
        let m = CentralityMeasure::Eigenvector;
        let base = scored(&graph(&rows), m, &params());
        prop_assume!(base.is_some());
        let base = base.unwrap();
        // Power-of-two scaling is exact in floating point.
        let exact = compute(&graph(&scaled(&rows, 2f64.powi(k))), m, &params()).unwrap();
        prop_assert_eq!(&exact.scores, &base.scores);
        prop_assert_eq!(&exact.ranking, &base.ranking);
        let Some(other) = scored(&graph(&scaled(&rows, c)), m, &params()) else { return Ok(()) };
        for (x, y) in other.scores.iter().zip(&base.scores) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn pagerank_mass_is_conserved(rows in weights(12), damping in 0.0f64..0.95) {
        let p = MeasureParams { damping, ..params() };
        let r = compute(&graph(&rows), CentralityMeasure::PageRank, &p).unwrap();
        prop_assert!((r.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn relabeling_permutes_scores(rows in weights(9), seed in any::<u64>()) {
        let n = rows.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = tempocent_testkit::rng(seed);
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let g = graph(&rows);
        let moved = SlotGraph::new(0, g.adjacency.permuted(&perm).unwrap(), g.registry.clone()).unwrap();
        for m in CentralityMeasure::ALL {
            let (Some(a), Some(b)) = (scored(&g, m, &params()), scored(&moved, m, &params())) else { continue };
            for v in 0..n {
                let (x, y) = (a.scores[v], b.scores[perm[v]]);
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{} node {}: {} vs {}", m, v, x, y);
            }
        }
    }

    #[test]
    fn smoothing_preserves_matrix_invariants(now in weights(8), seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let n = now.len();
        let mut rng = tempocent_testkit::rng(seed);
        let before = tempocent_testkit::random_weights(&mut rng, n, 0.5, 10.0);
        let reg = Arc::new(NodeRegistry::from_labels((0..n).map(|i| i.to_string())).unwrap());
        let prev = SlotGraph::new(0, AdjacencyMatrix::from_rows(&before).unwrap(), reg.clone()).unwrap();
        let cur = SlotGraph::new(1, AdjacencyMatrix::from_rows(&now).unwrap(), reg).unwrap();
        let out = smooth_adjacency(&cur, Some(&prev), &SmoothingConfig::new(alpha).unwrap()).unwrap();
        let w = &out.adjacency;
        prop_assert!(AdjacencyMatrix::from_vec(n, w.as_slice().to_vec()).is_ok());
        for i in 0..n {
            for j in 0..n {
                let (a, b, x) = (now[i][j], before[i][j], w.weight(i, j));
                prop_assert!(a.min(b) - 1e-12 <= x && x <= a.max(b) + 1e-12);
                if a == 0.0 && b > 0.0 && alpha > 0.0 {
                    prop_assert!(x > 0.0);
                }
            }
        }
    }

    #[test]
    fn cliques_are_valid_maximal_and_cover_edges(rows in weights(14)) {
        let g = binarize(&graph(&rows), 0.0);
        let set = bron_kerbosch_pivot(&g, 0, &CliqueConfig::default()).unwrap();
        for c in &set.cliques {
            prop_assert!(is_clique(&g, c.members()));
            prop_assert!(is_maximal_clique(&g, c.members()));
            prop_assert!(c.members().windows(2).all(|w| w[0] < w[1]));
        }
        for (u, v) in g.edges() {
            prop_assert!(set.cliques.iter().any(|c| c.contains(u) && c.contains(v)));
        }
        prop_assert!(set.cliques.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(set.size_histogram.values().sum::<usize>(), set.len());
    }

    #[test]
    fn cliques_follow_relabeling(rows in weights(10), seed in any::<u64>()) {
        let n = rows.len();
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut tempocent_testkit::rng(seed));
        let g = binarize(&graph(&rows), 0.0);
        let edges: Vec<_> = g.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        let moved = BinaryGraph::from_edges(n, &edges).unwrap();
        let cfg = CliqueConfig::default();
        let mut expected: Vec<Vec<usize>> = bron_kerbosch(&g, 0, &cfg).unwrap().cliques.iter()
            .map(|c| { let mut m: Vec<usize> = c.members().iter().map(|&v| perm[v]).collect(); m.sort_unstable(); m })
            .collect();
        expected.sort();
        let got: Vec<Vec<usize>> = bron_kerbosch(&moved, 0, &cfg).unwrap().cliques.iter().map(|c| c.members().to_vec()).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn similarity_is_additive_over_interval_aligned_splits(
        raw in proptest::collection::vec((0usize..6, 1usize..6, 0u64..4_000), 1..150),
        cut in 0u64..40,
    ) {
        let labels: Vec<String> = (0..6).map(|i| format!("u{i}")).collect();
        let reg = NodeRegistry::from_labels(labels.clone()).unwrap();
        let cfg = SlotConfig::new(1_000, 100, 0).unwrap();
        let events: Vec<ContactEvent> = raw.iter()
            .map(|&(a, d, ts)| ContactEvent::new(labels[a].clone(), labels[(a + d) % 6].clone(), ts))
            .collect();
        // Split on an interval boundary so no interval straddles the halves.
        let boundary = cut * 100;
        let (early, late): (Vec<_>, Vec<_>) = events.iter().cloned().partition(|e| e.timestamp < boundary);
        let whole = build_similarity(&events, &reg, &cfg).unwrap();
        let mut merged = vec![vec![0u32; 36]; 4];
        for part in [early, late].iter().filter(|p| !p.is_empty()) {
            for s in build_similarity(part, &reg, &cfg).unwrap() {
                for (acc, c) in merged[s.slot as usize].iter_mut().zip(s.counts()) {
                    *acc += c;
                }
            }
        }
        for s in &whole {
            prop_assert_eq!(s.counts(), merged[s.slot as usize].as_slice());
            prop_assert!(s.counts().iter().all(|&c| u64::from(c) <= cfg.intervals_per_slot()));
        }
    }
}

#[test]
fn rank_ties_break_by_id() {
    assert_eq!(rank_descending(&[0.0, 0.0, 0.0]), vec![0, 1, 2]);
}
