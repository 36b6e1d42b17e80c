//! Temporal contact-graph analytics.
//!
//! Timestamped proximity events are bucketed into fixed-duration slots,
//! each slot becomes a weighted contact graph, and every slot can be scored
//! with degree, closeness, betweenness, eigenvector or PageRank centrality.
//! The [`evolutionary`] module blends each slot's adjacency with the
//! previous slot's before scoring, and [`cliques`] enumerates maximal
//! cliques per slot and derives clique-based sentinel nodes.
//!
//! ```
//! use std::sync::Arc;
//! use tempocent_core::graph::{AdjacencyMatrix, NodeRegistry, SlotGraph};
//! use tempocent_core::centrality::degree_centrality;
//!
//! let registry = Arc::new(NodeRegistry::from_labels(["a", "b", "c"]).unwrap());
//! let adjacency = AdjacencyMatrix::from_rows(&[
//!     vec![0.0, 1.0, 1.0],
//!     vec![1.0, 0.0, 0.0],
//!     vec![1.0, 0.0, 0.0],
//! ])
//! .unwrap();
//! let slot = SlotGraph::new(0, adjacency, registry).unwrap();
//! let result = degree_centrality(&slot, 0.0);
//! assert_eq!(result.scores, vec![2.0, 1.0, 1.0]);
//! assert_eq!(result.ranking[0], 0);
//! ```

pub mod centrality;
pub mod cliques;
pub mod error;
pub mod evolutionary;
pub mod graph;
pub mod ingest;

pub use centrality::{CentralityMeasure, CentralityResult, MeasureParams, PowerIterationConfig};
pub use cliques::{Clique, CliqueConfig, CliqueSet, SentinelReport};
pub use error::{Error, Result};
pub use evolutionary::SmoothingConfig;
pub use graph::{AdjacencyMatrix, BinaryGraph, Distance, NodeId, NodeRegistry, SlotGraph};
pub use ingest::{ContactEvent, ParseMode, SimilarityMatrix, SlotConfig};
