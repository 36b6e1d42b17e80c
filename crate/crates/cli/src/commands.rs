//! Subcommand implementations. Each command computes every output in
//! memory first and only then touches the output directory, so a failing
//! run leaves no partial results behind.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use tempocent_core::centrality::{
    CentralityMeasure, CentralityResult, MeasureParams, PowerIterationConfig,
};
use tempocent_core::cliques::{
    bron_kerbosch, bron_kerbosch_pivot, clique_histogram, sentinel_nodes, CliqueConfig, CliqueSet,
};
use tempocent_core::evolutionary::{evolutionary_centrality, SmoothingConfig};
use tempocent_core::graph::{binarize, NodeRegistry, SlotGraph};
use tempocent_core::ingest::{
    self, ParseMode, SlotConfig, DEFAULT_INTERVAL_DURATION, DEFAULT_SLOT_DURATION,
};

use crate::formats::{self, Normalize, OutputFormat};
use crate::synth::{self, SyntheticModel};

/// Everything a pipeline run needs; numeric ranges are checked by the
/// owning library types when the run starts.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub outdir: PathBuf,
    pub slot_duration: u64,
    pub interval: u64,
    pub origin: Option<u64>,
    pub lenient: bool,
    pub threshold: f64,
    pub alpha: f64,
    pub measures: Vec<CentralityMeasure>,
    pub damping: f64,
    pub power: PowerIterationConfig,
    pub phi: f64,
    pub window: usize,
    pub min_clique_size: usize,
    pub max_cliques: usize,
    pub pivot: bool,
    pub format: OutputFormat,
    pub normalize: Normalize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            outdir: PathBuf::from("out"),
            slot_duration: DEFAULT_SLOT_DURATION,
            interval: DEFAULT_INTERVAL_DURATION,
            origin: None,
            lenient: false,
            threshold: 0.0,
            alpha: 0.5,
            measures: CentralityMeasure::ALL.to_vec(),
            damping: 0.85,
            power: PowerIterationConfig::default(),
            phi: 1.0,
            window: 3,
            min_clique_size: 1,
            max_cliques: CliqueConfig::default().max_cliques,
            pivot: true,
            format: OutputFormat::Json,
            normalize: Normalize::None,
        }
    }
}

impl RunConfig {
    fn measure_params(&self) -> Result<MeasureParams> {
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            bail!(
                "threshold {} must be a finite non-negative number",
                self.threshold
            );
        }
        if !(0.0..=1.0).contains(&self.damping) {
            bail!("damping {} must lie in [0, 1]", self.damping);
        }
        self.power.validate()?;
        Ok(MeasureParams {
            threshold: self.threshold,
            damping: self.damping,
            power: self.power,
        })
    }
}

/// Files produced by a command, written together by [`Outputs::commit`].
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    fn add(&mut self, name: impl Into<PathBuf>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn names(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    /// Writes every file under `dir`. On failure, files already written by
    /// this call are removed again.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in self.files {
            let path = dir.join(name);
            if let Err(e) = fs::write(&path, bytes) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                return Err(e).with_context(|| format!("writing {}", path.display()));
            }
            written.push(path);
        }
        Ok(written)
    }
}

/// Slot graphs from either an ingested directory or a contact CSV file.
/// Returns whether the input was raw CSV.
pub fn load_slots(cfg: &RunConfig) -> Result<(Arc<NodeRegistry>, Vec<SlotGraph>, bool)> {
    if cfg.input.is_dir() {
        let (registry, slots) = formats::load_ingested(&cfg.input)?;
        return Ok((registry, slots, false));
    }
    let (registry, slots) = ingest_csv(cfg)?;
    Ok((registry, slots, true))
}

fn ingest_csv(cfg: &RunConfig) -> Result<(Arc<NodeRegistry>, Vec<SlotGraph>)> {
    let path = &cfg.input;
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mode = if cfg.lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    };
    let parsed = ingest::parse_events(BufReader::new(file), mode)
        .with_context(|| format!("in {}", path.display()))?;
    for w in &parsed.warnings {
        eprintln!(
            "warning: {}:{}: skipped line: {}",
            path.display(),
            w.line,
            w.kind
        );
    }
    if parsed.events.is_empty() {
        bail!("{}: no events", path.display());
    }
    let slot_cfg = match cfg.origin {
        Some(origin) => SlotConfig::new(cfg.slot_duration, cfg.interval, origin)?,
        None => SlotConfig::with_default_origin(&parsed.events, cfg.slot_duration, cfg.interval)?,
    };
    let sims = ingest::build_similarity(&parsed.events, &parsed.registry, &slot_cfg)
        .with_context(|| format!("in {}", path.display()))?;
    let registry = Arc::new(parsed.registry);
    let slots = ingest::to_slot_graphs(&sims, registry.clone())?;
    Ok((registry, slots))
}

fn ingest_outputs(registry: &NodeRegistry, slots: &[SlotGraph], out: &mut Outputs) {
    out.add(formats::REGISTRY_FILE, formats::registry_json(registry));
    for g in slots {
        out.add(formats::slot_file_name(g.slot), formats::slot_json(g));
    }
}

/// Removes `slot_<t>.json` files left by an earlier ingest into `dir`.
fn clear_stale_slots(dir: &Path) -> Result<()> {
    let Ok(entries) = fs::read_dir(dir) else {
        return Ok(());
    };
    for entry in entries {
        let path = entry?.path();
        let stale = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("slot_") && n.ends_with(".json"));
        if stale {
            fs::remove_file(&path).with_context(|| format!("removing {}", path.display()))?;
        }
    }
    Ok(())
}

pub fn ingest(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (registry, slots) = ingest_csv(cfg)?;
    let mut out = Outputs::default();
    ingest_outputs(&registry, &slots, &mut out);
    clear_stale_slots(&cfg.outdir)?;
    out.commit(&cfg.outdir)
}

/// Scores every slot with every requested measure. `alpha = 0` gives plain
/// per-slot centrality.
pub fn centrality_results(
    cfg: &RunConfig,
    slots: &[SlotGraph],
) -> Result<Vec<(CentralityMeasure, Vec<CentralityResult>)>> {
    let params = cfg.measure_params()?;
    let smoothing = SmoothingConfig::new(cfg.alpha)?;
    cfg.measures
        .iter()
        .map(|&m| {
            let results = evolutionary_centrality(slots, m, &smoothing, &params)
                .with_context(|| format!("{m} centrality"))?;
            Ok((m, results))
        })
        .collect()
}

fn centrality_outputs(
    cfg: &RunConfig,
    registry: &NodeRegistry,
    slots: &[SlotGraph],
    out: &mut Outputs,
) -> Result<()> {
    for (measure, results) in centrality_results(cfg, slots)? {
        match cfg.format {
            OutputFormat::Json => {
                for r in &results {
                    let record = formats::centrality_record(r, registry, cfg.alpha, cfg.normalize);
                    out.add(
                        formats::centrality_json_name(measure, r.slot),
                        formats::centrality_json(&record),
                    );
                }
            }
            OutputFormat::Csv => {
                out.add(
                    formats::centrality_csv_name(measure),
                    formats::centrality_csv(&results, registry, cfg.normalize),
                );
            }
        }
    }
    Ok(())
}

pub fn centrality(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (registry, slots, _) = load_slots(cfg)?;
    let mut out = Outputs::default();
    centrality_outputs(cfg, &registry, &slots, &mut out)?;
    out.commit(&cfg.outdir)
}

/// Maximal cliques of every slot, filtered to `min_clique_size`.
pub fn clique_sets(cfg: &RunConfig, slots: &[SlotGraph]) -> Result<Vec<CliqueSet>> {
    if !(cfg.threshold >= 0.0 && cfg.threshold.is_finite()) {
        bail!(
            "threshold {} must be a finite non-negative number",
            cfg.threshold
        );
    }
    let clique_cfg = CliqueConfig {
        max_cliques: cfg.max_cliques,
    };
    let enumerate = if cfg.pivot {
        bron_kerbosch_pivot
    } else {
        bron_kerbosch
    };
    let sets: Vec<_> = slots
        .par_iter()
        .map(|g| {
            enumerate(&binarize(g, cfg.threshold), g.slot, &clique_cfg)
                .map(|s| s.with_min_size(cfg.min_clique_size))
        })
        .collect();
    Ok(sets.into_iter().collect::<Result<_, _>>()?)
}

fn clique_outputs(
    cfg: &RunConfig,
    registry: &NodeRegistry,
    slots: &[SlotGraph],
    out: &mut Outputs,
) -> Result<()> {
    let sets = clique_sets(cfg, slots)?;
    let reports = sentinel_nodes(&sets, cfg.phi, cfg.window)?;
    out.add(
        formats::CLIQUES_FILE,
        formats::clique_lines(&sets, registry),
    );
    out.add(
        formats::HISTOGRAM_FILE,
        formats::histogram_csv(&clique_histogram(&sets)),
    );
    out.add(
        formats::SENTINELS_FILE,
        formats::sentinels_json(&reports, &sets, registry),
    );
    Ok(())
}

pub fn cliques(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (registry, slots, _) = load_slots(cfg)?;
    let mut out = Outputs::default();
    clique_outputs(cfg, &registry, &slots, &mut out)?;
    out.commit(&cfg.outdir)
}

/// Ingest (when given CSV), centrality and cliques in one run.
pub fn report(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (registry, slots, from_csv) = load_slots(cfg)?;
    let mut out = Outputs::default();
    if from_csv {
        ingest_outputs(&registry, &slots, &mut out);
    }
    centrality_outputs(cfg, &registry, &slots, &mut out)?;
    clique_outputs(cfg, &registry, &slots, &mut out)?;
    if from_csv {
        clear_stale_slots(&cfg.outdir)?;
    }
    out.commit(&cfg.outdir)
}

/// Writes a synthetic trace to `output`, or stdout when `None`.
pub fn synth(model: &SyntheticModel, output: Option<&Path>) -> Result<usize> {
    let events = model.generate()?;
    match output {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))?;
            }
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            synth::write_events(std::io::BufWriter::new(file), &events)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => synth::write_events(std::io::stdout().lock(), &events)?,
    }
    Ok(events.len())
}
