//! `tempocent` command-line front end: ingest contact traces, score slots
//! with plain or evolutionary centrality, enumerate maximal cliques, and
//! generate seeded synthetic traces.

pub mod args;
pub mod commands;
pub mod formats;
pub mod synth;

pub use args::{run, Cli};
pub use commands::RunConfig;
