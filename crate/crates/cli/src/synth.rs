//! Seeded synthetic contact traces with planted communities and hubs.
//!
//! Every node belongs to one of `n_communities` contiguous blocks. In each
//! slot, each pair draws a Poisson number of contact events: `intra_rate`
//! for pairs inside a block, `inter_rate` across blocks, both multiplied by
//! `hub_boost` when either endpoint is a hub. Event times are uniform over
//! the slot.

use std::io::Write;

use anyhow::{ensure, Result};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use tempocent_core::ingest::{ContactEvent, CSV_HEADER, DEFAULT_SLOT_DURATION};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticModel {
    pub n_nodes: usize,
    pub n_slots: usize,
    pub n_communities: usize,
    pub intra_rate: f64,
    pub inter_rate: f64,
    pub hub_count: usize,
    pub hub_boost: f64,
    pub seed: u64,
    pub slot_duration: u64,
    pub origin: u64,
}

impl Default for SyntheticModel {
    fn default() -> Self {
        Self {
            n_nodes: 40,
            n_slots: 6,
            n_communities: 4,
            intra_rate: 3.0,
            inter_rate: 0.05,
            hub_count: 2,
            hub_boost: 4.0,
            seed: 42,
            slot_duration: DEFAULT_SLOT_DURATION,
            origin: 0,
        }
    }
}

impl SyntheticModel {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.n_communities >= 1,
            "at least one community is required"
        );
        ensure!(
            self.n_nodes == 0 || self.n_communities <= self.n_nodes,
            "more communities ({}) than nodes ({})",
            self.n_communities,
            self.n_nodes
        );
        for (name, rate) in [
            ("intra rate", self.intra_rate),
            ("inter rate", self.inter_rate),
            ("hub boost", self.hub_boost),
        ] {
            ensure!(
                rate.is_finite() && rate >= 0.0,
                "{name} must be a finite non-negative number, got {rate}"
            );
        }
        ensure!(
            self.hub_count <= self.n_nodes,
            "hub count {} exceeds node count {}",
            self.hub_count,
            self.n_nodes
        );
        ensure!(self.slot_duration >= 1, "slot duration must be positive");
        Ok(())
    }

    pub fn community(&self, node: usize) -> usize {
        node * self.n_communities / self.n_nodes.max(1)
    }

    pub fn label(&self, node: usize) -> String {
        let width = self.n_nodes.saturating_sub(1).to_string().len();
        format!("u{node:0width$}")
    }

    /// Hub node indices, ascending.
    pub fn hubs(&self) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x6875_6273);
        let mut hubs = index::sample(&mut rng, self.n_nodes, self.hub_count).into_vec();
        hubs.sort_unstable();
        hubs
    }

    /// Events sorted by timestamp, then labels.
    pub fn generate(&self) -> Result<Vec<ContactEvent>> {
        self.validate()?;
        let mut is_hub = vec![false; self.n_nodes];
        for h in self.hubs() {
            is_hub[h] = true;
        }
        let labels: Vec<String> = (0..self.n_nodes).map(|v| self.label(v)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut events = Vec::new();
        for slot in 0..self.n_slots as u64 {
            let start = self.origin + slot * self.slot_duration;
            for u in 0..self.n_nodes {
                for v in u + 1..self.n_nodes {
                    let mut rate = if self.community(u) == self.community(v) {
                        self.intra_rate
                    } else {
                        self.inter_rate
                    };
                    if is_hub[u] || is_hub[v] {
                        rate *= self.hub_boost;
                    }
                    if rate <= 0.0 {
                        continue;
                    }
                    let count = Poisson::new(rate)?.sample(&mut rng) as u64;
                    for _ in 0..count {
                        let ts = start + rng.random_range(0..self.slot_duration);
                        events.push(ContactEvent::new(labels[u].clone(), labels[v].clone(), ts));
                    }
                }
            }
        }
        events.sort_by(|a, b| {
            (a.timestamp, &a.node_a, &a.node_b).cmp(&(b.timestamp, &b.node_a, &b.node_b))
        });
        Ok(events)
    }
}

/// Writes events as contact CSV with a header line.
pub fn write_events<W: Write>(mut out: W, events: &[ContactEvent]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for e in events {
        writeln!(out, "{},{},{}", e.node_a, e.node_b, e.timestamp)?;
    }
    out.flush()
}
