use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tempocent_core::centrality::PowerIterationConfig;
use tempocent_core::CentralityMeasure;

use crate::commands::{self, RunConfig};
use crate::formats::{Normalize, OutputFormat};
use crate::synth::SyntheticModel;

/// Caps the rayon worker count; 0 or unset means one per core.
pub const THREADS_ENV: &str = "TEMPOCENT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "tempocent",
    version,
    about = "Centrality and maximal cliques over time-sliced contact graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a contact CSV and write registry.json plus one slot_<t>.json per slot.
    Ingest {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Score every slot with the selected centrality measures.
    Centrality {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        scoring: CentralityArgs,
    },
    /// Enumerate maximal cliques per slot and derive sentinel nodes.
    Cliques {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        cliques: CliqueArgs,
    },
    /// Generate a seeded synthetic contact trace.
    Synth(SynthArgs),
    /// Ingest, centrality and cliques in one run.
    Report {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        scoring: CentralityArgs,
        #[command(flatten)]
        cliques: CliqueArgs,
    },
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Contact CSV file, or a directory written by `ingest`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "out")]
    pub outdir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Slot length in seconds.
    #[arg(long, default_value_t = 604_800)]
    pub slot_duration: u64,
    /// Proximity-counting interval in seconds.
    #[arg(long, default_value_t = 300)]
    pub interval: u64,
    /// Timestamp of slot 0; defaults to the earliest event rounded down to a slot boundary.
    #[arg(long)]
    pub origin: Option<u64>,
    /// Skip malformed CSV lines with a warning instead of failing.
    #[arg(long)]
    pub lenient: bool,
    /// Edge exists iff weight > threshold (degree, closeness, betweenness, cliques).
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Degree,
    Closeness,
    Betweenness,
    Eigenvector,
    Pagerank,
    All,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub measure: Vec<MeasureArg>,
    /// History weight; 0 gives plain per-slot centrality.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.85)]
    pub damping: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    #[arg(long, value_enum, default_value = "none")]
    pub normalize: Normalize,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct CliqueArgs {
    /// Fraction of a slot's cliques a node must belong to to count as common.
    #[arg(long, default_value_t = 1.0)]
    pub phi: f64,
    /// Consecutive slots a node must stay common to become a persistent sentinel.
    #[arg(long, default_value_t = 3)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub min_clique_size: usize,
    /// Abort a slot once it has more maximal cliques than this.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_cliques: usize,
    /// Use plain Bron-Kerbosch instead of the pivoting variant (same output).
    #[arg(long)]
    pub no_pivot: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 40)]
    pub nodes: usize,
    #[arg(long, default_value_t = 6)]
    pub slots: usize,
    #[arg(long, default_value_t = 4)]
    pub communities: usize,
    /// Expected events per same-community pair per slot.
    #[arg(long, default_value_t = 3.0)]
    pub intra_rate: f64,
    /// Expected events per cross-community pair per slot.
    #[arg(long, default_value_t = 0.05)]
    pub inter_rate: f64,
    #[arg(long, default_value_t = 2)]
    pub hubs: usize,
    /// Rate multiplier for pairs touching a hub.
    #[arg(long, default_value_t = 4.0)]
    pub hub_boost: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 604_800)]
    pub slot_duration: u64,
    #[arg(long, default_value_t = 0)]
    pub origin: u64,
}

impl From<&SynthArgs> for SyntheticModel {
    fn from(a: &SynthArgs) -> Self {
        SyntheticModel {
            n_nodes: a.nodes,
            n_slots: a.slots,
            n_communities: a.communities,
            intra_rate: a.intra_rate,
            inter_rate: a.inter_rate,
            hub_count: a.hubs,
            hub_boost: a.hub_boost,
            seed: a.seed,
            slot_duration: a.slot_duration,
            origin: a.origin,
        }
    }
}

fn measures(args: &[MeasureArg]) -> Vec<CentralityMeasure> {
    let mut out = Vec::new();
    for a in args {
        let add: &[CentralityMeasure] = match a {
            MeasureArg::Degree => &[CentralityMeasure::Degree],
            MeasureArg::Closeness => &[CentralityMeasure::Closeness],
            MeasureArg::Betweenness => &[CentralityMeasure::Betweenness],
            MeasureArg::Eigenvector => &[CentralityMeasure::Eigenvector],
            MeasureArg::Pagerank => &[CentralityMeasure::PageRank],
            MeasureArg::All => &CentralityMeasure::ALL,
        };
        for m in add {
            if !out.contains(m) {
                out.push(*m);
            }
        }
    }
    out.sort();
    out
}

fn run_config(
    io: &IoArgs,
    graph: &GraphArgs,
    scoring: Option<&CentralityArgs>,
    cliques: Option<&CliqueArgs>,
) -> RunConfig {
    let mut cfg = RunConfig {
        input: io.input.clone(),
        outdir: io.outdir.clone(),
        slot_duration: graph.slot_duration,
        interval: graph.interval,
        origin: graph.origin,
        lenient: graph.lenient,
        threshold: graph.threshold,
        ..RunConfig::default()
    };
    if let Some(s) = scoring {
        cfg.measures = measures(&s.measure);
        cfg.alpha = s.alpha;
        cfg.damping = s.damping;
        cfg.format = s.format;
        cfg.normalize = s.normalize;
        cfg.power = PowerIterationConfig {
            max_iters: s.max_iters,
            tolerance: s.tolerance,
        };
    }
    if let Some(c) = cliques {
        cfg.phi = c.phi;
        cfg.window = c.window;
        cfg.min_clique_size = c.min_clique_size;
        cfg.max_cliques = c.max_cliques;
        cfg.pivot = !c.no_pivot;
    }
    cfg
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .with_context(|| format!("{THREADS_ENV}={v:?} is not a non-negative integer"))?,
        _ => 0,
    };
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?)
}

fn report_written(paths: &[PathBuf]) {
    eprintln!("wrote {} file(s)", paths.len());
}

pub fn run(cli: Cli) -> Result<()> {
    let pool = thread_pool()?;
    pool.install(|| match &cli.command {
        Command::Ingest { io, graph } => {
            report_written(&commands::ingest(&run_config(io, graph, None, None))?);
            Ok(())
        }
        Command::Centrality { io, graph, scoring } => {
            report_written(&commands::centrality(&run_config(
                io,
                graph,
                Some(scoring),
                None,
            ))?);
            Ok(())
        }
        Command::Cliques { io, graph, cliques } => {
            report_written(&commands::cliques(&run_config(
                io,
                graph,
                None,
                Some(cliques),
            ))?);
            Ok(())
        }
        Command::Report {
            io,
            graph,
            scoring,
            cliques,
        } => {
            report_written(&commands::report(&run_config(
                io,
                graph,
                Some(scoring),
                Some(cliques),
            ))?);
            Ok(())
        }
        Command::Synth(args) => {
            let n = commands::synth(&SyntheticModel::from(args), args.output.as_deref())?;
            eprintln!("generated {n} event(s)");
            Ok(())
        }
    })
}
