//! On-disk formats.
//!
//! JSON floats are written in the shortest decimal form that round-trips
//! (serde_json); CSV floats use Rust's `Display`, which is also shortest
//! round-trip. Every file ends with a newline.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use tempocent_core::centrality::{CentralityResult, Diagnostics};
use tempocent_core::cliques::{CliqueSet, SentinelReport};
use tempocent_core::graph::{AdjacencyMatrix, NodeRegistry, SlotGraph};
use tempocent_core::CentralityMeasure;

pub const REGISTRY_FILE: &str = "registry.json";
pub const CLIQUES_FILE: &str = "cliques.tsv";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const SENTINELS_FILE: &str = "sentinels.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Normalize {
    #[default]
    None,
    Max,
}

pub fn slot_file_name(slot: u64) -> String {
    format!("slot_{slot}.json")
}

pub fn centrality_json_name(measure: CentralityMeasure, slot: u64) -> String {
    format!("centrality_{measure}_slot_{slot}.json")
}

pub fn centrality_csv_name(measure: CentralityMeasure) -> String {
    format!("centrality_{measure}.csv")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotFile {
    pub slot: u64,
    pub n: usize,
    pub weights: Vec<Vec<f64>>,
}

fn json_line<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec(value).expect("serializable");
    out.push(b'\n');
    out
}

fn json_pretty<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

pub fn registry_json(registry: &NodeRegistry) -> Vec<u8> {
    json_line(registry.labels())
}

pub fn slot_json(g: &SlotGraph) -> Vec<u8> {
    json_line(&SlotFile {
        slot: g.slot,
        n: g.n(),
        weights: g.adjacency.to_rows(),
    })
}

/// Loads `registry.json` and every `slot_<t>.json` from `dir`, ordered by
/// slot.
pub fn load_ingested(dir: &Path) -> Result<(Arc<NodeRegistry>, Vec<SlotGraph>)> {
    let reg_path = dir.join(REGISTRY_FILE);
    let labels: Vec<String> = serde_json::from_slice(
        &fs::read(&reg_path).with_context(|| format!("reading {}", reg_path.display()))?,
    )
    .with_context(|| format!("parsing {}", reg_path.display()))?;
    let registry = Arc::new(
        NodeRegistry::from_labels(labels).with_context(|| format!("in {}", reg_path.display()))?,
    );

    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let Some(slot) = name
            .strip_prefix("slot_")
            .and_then(|s| s.strip_suffix(".json"))
            .and_then(|s| s.parse::<u64>().ok())
        {
            files.insert(slot, path);
        }
    }
    ensure!(!files.is_empty(), "no slot files in {}", dir.display());

    let mut slots = Vec::with_capacity(files.len());
    for (slot, path) in files {
        let file: SlotFile = serde_json::from_slice(
            &fs::read(&path).with_context(|| format!("reading {}", path.display()))?,
        )
        .with_context(|| format!("parsing {}", path.display()))?;
        if file.slot != slot || file.n != file.weights.len() {
            bail!(
                "{}: header does not match file name or matrix size",
                path.display()
            );
        }
        let adjacency = AdjacencyMatrix::from_rows(&file.weights)
            .with_context(|| format!("in {}", path.display()))?;
        slots.push(
            SlotGraph::new(slot, adjacency, registry.clone())
                .with_context(|| format!("in {}", path.display()))?,
        );
    }
    Ok((registry, slots))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub label: String,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityRecord {
    pub slot: u64,
    pub measure: CentralityMeasure,
    pub alpha: f64,
    pub normalize: Normalize,
    pub scores: Vec<ScoreEntry>,
    pub diagnostics: Diagnostics,
}

fn displayed_scores(result: &CentralityResult, normalize: Normalize) -> Vec<f64> {
    match normalize {
        Normalize::None => result.scores.clone(),
        Normalize::Max => result.max_normalized(),
    }
}

pub fn centrality_record(
    result: &CentralityResult,
    registry: &NodeRegistry,
    alpha: f64,
    normalize: Normalize,
) -> CentralityRecord {
    let ranks = result.ranks();
    let scores = displayed_scores(result, normalize)
        .into_iter()
        .enumerate()
        .map(|(v, score)| ScoreEntry {
            label: registry.labels()[v].clone(),
            score,
            rank: ranks[v],
        })
        .collect();
    CentralityRecord {
        slot: result.slot,
        measure: result.measure,
        alpha,
        normalize,
        scores,
        diagnostics: result.diagnostics.clone(),
    }
}

pub fn centrality_json(record: &CentralityRecord) -> Vec<u8> {
    json_pretty(record)
}

/// `slot,measure,label,score,rank` rows for every slot of one measure.
pub fn centrality_csv(
    results: &[CentralityResult],
    registry: &NodeRegistry,
    normalize: Normalize,
) -> Vec<u8> {
    let mut out = String::from("slot,measure,label,score,rank\n");
    for r in results {
        let ranks = r.ranks();
        for (v, score) in displayed_scores(r, normalize).into_iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.slot,
                r.measure,
                registry.labels()[v],
                score,
                ranks[v]
            ));
        }
    }
    out.into_bytes()
}

/// One clique per line: `slot<TAB>size<TAB>labels`, labels sorted and
/// comma-joined.
pub fn clique_lines(sets: &[CliqueSet], registry: &NodeRegistry) -> Vec<u8> {
    let mut out = String::new();
    for set in sets {
        for c in &set.cliques {
            let mut labels: Vec<&str> = c
                .members()
                .iter()
                .map(|&v| registry.labels()[v].as_str())
                .collect();
            labels.sort_unstable();
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                set.slot,
                c.size(),
                labels.join(",")
            ));
        }
    }
    out.into_bytes()
}

pub fn histogram_csv(hist: &BTreeMap<usize, usize>) -> Vec<u8> {
    let mut out = String::from("size,count\n");
    for (size, count) in hist {
        out.push_str(&format!("{size},{count}\n"));
    }
    out.into_bytes()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Participation {
    pub label: String,
    pub cliques: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentinelRecord {
    pub slot: u64,
    pub clique_count: usize,
    pub participation: Vec<Participation>,
    pub common_nodes: Vec<String>,
    pub persistent_sentinels: Vec<String>,
}

pub fn sentinels_json(
    reports: &[SentinelReport],
    sets: &[CliqueSet],
    registry: &NodeRegistry,
) -> Vec<u8> {
    let labels = registry.labels();
    let records: Vec<SentinelRecord> = reports
        .iter()
        .zip(sets)
        .map(|(r, set)| SentinelRecord {
            slot: r.slot,
            clique_count: set.len(),
            participation: r
                .participation
                .iter()
                .enumerate()
                .map(|(v, &cliques)| Participation {
                    label: labels[v].clone(),
                    cliques,
                })
                .collect(),
            common_nodes: r.common_nodes.iter().map(|&v| labels[v].clone()).collect(),
            persistent_sentinels: r
                .persistent_sentinels
                .iter()
                .map(|&v| labels[v].clone())
                .collect(),
        })
        .collect();
    json_pretty(&records)
}
