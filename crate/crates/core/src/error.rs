use std::fmt;

use thiserror::Error;

use crate::centrality::CentralityMeasure;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} is out of range for a graph with {n} nodes")]
    InvalidNode { node: usize, n: usize },

    #[error("invalid adjacency matrix: {0}")]
    InvalidMatrix(String),

    #[error("shape mismatch: expected {expected} nodes, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown node label {0:?}")]
    UnknownLabel(String),

    #[error("{kind} at line {line}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("no events")]
    NoEvents,

    #[error("event {index} ({node_a},{node_b},{timestamp}) precedes slot origin {origin}")]
    EventBeforeOrigin {
        index: usize,
        node_a: String,
        node_b: String,
        timestamp: u64,
        origin: u64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "{measure} centrality did not converge for slot {slot} after {iterations} iterations \
         (residual {residual:e}){hint}",
        hint = if *measure == CentralityMeasure::PageRank { "; try a damping factor below 1" } else { "" }
    )]
    NoConvergence {
        measure: CentralityMeasure,
        slot: u64,
        iterations: usize,
        residual: f64,
    },

    #[error("slot {slot} exceeded the maximal clique limit of {limit}")]
    CliqueLimit { slot: u64, limit: usize },

    #[error("slots must be consecutive: expected slot {expected}, found {found}")]
    NonConsecutiveSlots { expected: u64, found: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Why a line of contact CSV was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    FieldCount(usize),
    EmptyLabel,
    BadTimestamp(String),
    SelfContact(String),
    InvalidUtf8,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::FieldCount(n) => write!(f, "expected 3 fields, found {n}"),
            ParseErrorKind::EmptyLabel => f.write_str("empty node label"),
            ParseErrorKind::BadTimestamp(s) => write!(f, "invalid timestamp {s:?}"),
            ParseErrorKind::SelfContact(_) => f.write_str("self-contact"),
            ParseErrorKind::InvalidUtf8 => f.write_str("invalid UTF-8"),
        }
    }
}
