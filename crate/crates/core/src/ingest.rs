//! Contact-event ingestion.
//!
//! Input is CSV with one `node_a,node_b,timestamp` record per line. Lines
//! starting with `#` and blank lines are ignored, and a first data line equal
//! to `node_a,node_b,timestamp` is treated as a header. Labels are taken
//! verbatim (no trimming); a trailing `\r` is stripped from every line.
//!
//! Events are bucketed into slots of `slot_duration` seconds. Inside a slot a
//! pair's similarity is the number of distinct `interval_duration`-second
//! intervals in which the pair was seen at least once.

use std::io::BufRead;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseErrorKind, Result};
use crate::graph::{AdjacencyMatrix, NodeId, NodeRegistry, SlotGraph};

pub const CSV_HEADER: &str = "node_a,node_b,timestamp";

/// One week.
pub const DEFAULT_SLOT_DURATION: u64 = 604_800;
/// Five minutes.
pub const DEFAULT_INTERVAL_DURATION: u64 = 300;

/// One co-proximity observation between two distinct nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContactEvent {
    pub node_a: String,
    pub node_b: String,
    pub timestamp: u64,
}

impl ContactEvent {
    pub fn new(node_a: impl Into<String>, node_b: impl Into<String>, timestamp: u64) -> Self {
        Self {
            node_a: node_a.into(),
            node_b: node_b.into(),
            timestamp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// The first malformed line aborts parsing.
    #[default]
    Strict,
    /// Malformed lines are skipped and reported as warnings.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedEvents {
    pub events: Vec<ContactEvent>,
    pub registry: NodeRegistry,
    pub warnings: Vec<ParseWarning>,
}

/// Parses contact CSV. Line numbers in errors and warnings are 1-based.
pub fn parse_events<R: BufRead>(mut reader: R, mode: ParseMode) -> Result<ParsedEvents> {
    let mut out = ParsedEvents::default();
    let mut buf = Vec::new();
    let mut line_no = 0;
    let mut seen_data = false;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let mut bytes = buf.as_slice();
        if let Some(rest) = bytes.strip_suffix(b"\n") {
            bytes = rest;
        }
        if let Some(rest) = bytes.strip_suffix(b"\r") {
            bytes = rest;
        }
        let parsed = match std::str::from_utf8(bytes) {
            Ok(line) => {
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                if !seen_data && line == CSV_HEADER {
                    seen_data = true;
                    continue;
                }
                seen_data = true;
                parse_line(line)
            }
            Err(_) => Err(ParseErrorKind::InvalidUtf8),
        };
        match parsed {
            Ok(event) => {
                out.registry.intern(&event.node_a);
                out.registry.intern(&event.node_b);
                out.events.push(event);
            }
            Err(kind) => match mode {
                ParseMode::Strict => {
                    return Err(Error::Parse {
                        line: line_no,
                        kind,
                    })
                }
                ParseMode::Lenient => out.warnings.push(ParseWarning {
                    line: line_no,
                    kind,
                }),
            },
        }
    }
    Ok(out)
}

fn parse_line(line: &str) -> std::result::Result<ContactEvent, ParseErrorKind> {
    let fields: Vec<&str> = line.split(',').collect();
    let [a, b, ts] = fields[..] else {
        return Err(ParseErrorKind::FieldCount(fields.len()));
    };
    if a.is_empty() || b.is_empty() {
        return Err(ParseErrorKind::EmptyLabel);
    }
    if a == b {
        return Err(ParseErrorKind::SelfContact(a.to_owned()));
    }
    if ts.is_empty() || !ts.bytes().all(|c| c.is_ascii_digit()) {
        return Err(ParseErrorKind::BadTimestamp(ts.to_owned()));
    }
    let timestamp = ts
        .parse()
        .map_err(|_| ParseErrorKind::BadTimestamp(ts.to_owned()))?;
    Ok(ContactEvent::new(a, b, timestamp))
}

/// Slot bucketing parameters, all in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotConfig {
    pub slot_duration: u64,
    pub interval_duration: u64,
    pub origin: u64,
}

impl SlotConfig {
    pub fn new(slot_duration: u64, interval_duration: u64, origin: u64) -> Result<Self> {
        let cfg = Self {
            slot_duration,
            interval_duration,
            origin,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Origin at the earliest event timestamp rounded down to a multiple of
    /// `slot_duration`.
    pub fn with_default_origin(
        events: &[ContactEvent],
        slot_duration: u64,
        interval_duration: u64,
    ) -> Result<Self> {
        let mut cfg = Self::new(slot_duration, interval_duration, 0)?;
        let earliest = events
            .iter()
            .map(|e| e.timestamp)
            .min()
            .ok_or(Error::NoEvents)?;
        cfg.origin = earliest - earliest % slot_duration;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.interval_duration == 0 {
            return Err(Error::InvalidConfig(
                "interval duration must be at least 1 second".into(),
            ));
        }
        if self.slot_duration < self.interval_duration {
            return Err(Error::InvalidConfig(format!(
                "slot duration {} is shorter than interval duration {}",
                self.slot_duration, self.interval_duration
            )));
        }
        if !self.slot_duration.is_multiple_of(self.interval_duration) {
            return Err(Error::InvalidConfig(format!(
                "slot duration {} is not a multiple of interval duration {}",
                self.slot_duration, self.interval_duration
            )));
        }
        Ok(())
    }

    pub fn intervals_per_slot(&self) -> u64 {
        self.slot_duration / self.interval_duration
    }
}

/// Per-slot co-proximity interval counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityMatrix {
    pub slot: u64,
    n: usize,
    counts: Vec<u32>,
}

impl SimilarityMatrix {
    pub fn zeros(slot: u64, n: usize) -> Self {
        Self {
            slot,
            n,
            counts: vec![0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, i: NodeId, j: NodeId) -> u32 {
        self.counts[i * self.n + j]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    fn bump(&mut self, i: NodeId, j: NodeId) {
        self.counts[i * self.n + j] += 1;
        self.counts[j * self.n + i] += 1;
    }

    pub fn to_adjacency(&self) -> AdjacencyMatrix {
        AdjacencyMatrix::from_vec(self.n, self.counts.iter().map(|&c| f64::from(c)).collect())
            .expect("similarity counts are symmetric with zero diagonal")
    }
}

/// Buckets events into slots and counts distinct co-proximity intervals per
/// pair. Every slot from the first to the last non-empty one is returned,
/// empty slots as zero matrices.
pub fn build_similarity(
    events: &[ContactEvent],
    registry: &NodeRegistry,
    cfg: &SlotConfig,
) -> Result<Vec<SimilarityMatrix>> {
    cfg.validate()?;
    if events.is_empty() {
        return Err(Error::NoEvents);
    }
    let n = registry.len();
    let lookup = |label: &str| {
        registry
            .get(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    };

    // (interval, i, j) with i < j; distinct triples are what gets counted.
    let mut keys = Vec::with_capacity(events.len());
    for (index, e) in events.iter().enumerate() {
        if e.timestamp < cfg.origin {
            return Err(Error::EventBeforeOrigin {
                index,
                node_a: e.node_a.clone(),
                node_b: e.node_b.clone(),
                timestamp: e.timestamp,
                origin: cfg.origin,
            });
        }
        let (a, b) = (lookup(&e.node_a)?, lookup(&e.node_b)?);
        if a == b {
            return Err(Error::InvalidConfig(format!(
                "self-contact for node {:?}",
                e.node_a
            )));
        }
        let interval = (e.timestamp - cfg.origin) / cfg.interval_duration;
        keys.push((interval, a.min(b), a.max(b)));
    }
    keys.sort_unstable();
    keys.dedup();

    let per_slot = cfg.intervals_per_slot();
    let first = keys.first().map(|k| k.0 / per_slot).expect("non-empty");
    let last = keys.last().map(|k| k.0 / per_slot).expect("non-empty");
    let mut out: Vec<SimilarityMatrix> = (first..=last)
        .map(|s| SimilarityMatrix::zeros(s, n))
        .collect();
    for (interval, i, j) in keys {
        let slot = interval / per_slot;
        out[(slot - first) as usize].bump(i, j);
    }
    Ok(out)
}

/// Lifts similarity counts into weighted slot graphs sharing `registry`.
pub fn to_slot_graphs(
    sims: &[SimilarityMatrix],
    registry: Arc<NodeRegistry>,
) -> Result<Vec<SlotGraph>> {
    sims.iter()
        .map(|s| {
            if s.n() != registry.len() {
                return Err(Error::ShapeMismatch {
                    expected: registry.len(),
                    found: s.n(),
                });
            }
            SlotGraph::new(s.slot, s.to_adjacency(), Arc::clone(&registry))
        })
        .collect()
}
