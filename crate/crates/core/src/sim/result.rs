use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use crate::model::{SchemeKind, ValidatedScenario};
use crate::stats::wilson_interval;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("MixedScenario: results come from different scenarios")]
    MixedScenario,
    #[error("nothing to merge")]
    Empty,
}

/// Counters of one transmitter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UeStats {
    pub ue_id: u32,
    pub packets: u64,
    pub tx_success: u64,
    pub drops: u64,
    pub cca_attempts: u64,
    pub busy_ccas: u64,
    /// Arrivals lost because the previous packet was still waiting.
    pub suppressed_arrivals: u64,
    /// Packets that arrived while this transmitter's own COT was running.
    pub arrivals_in_own_cot: u64,
    pub alignment_sum_us: u64,
}

impl UeStats {
    pub fn p_failure_emp(&self) -> f64 {
        if self.packets == 0 {
            0.0
        } else {
            self.drops as f64 / self.packets as f64
        }
    }

    pub fn ci(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.drops, self.packets, z)
    }

    pub fn busy_fraction(&self) -> f64 {
        if self.cca_attempts == 0 {
            0.0
        } else {
            self.busy_ccas as f64 / self.cca_attempts as f64
        }
    }

    pub fn mean_alignment_us(&self) -> f64 {
        if self.packets == 0 {
            0.0
        } else {
            self.alignment_sum_us as f64 / self.packets as f64
        }
    }

    fn absorb(&mut self, other: &UeStats) {
        self.packets += other.packets;
        self.tx_success += other.tx_success;
        self.drops += other.drops;
        self.cca_attempts += other.cca_attempts;
        self.busy_ccas += other.busy_ccas;
        self.suppressed_arrivals += other.suppressed_arrivals;
        self.arrivals_in_own_cot += other.arrivals_in_own_cot;
        self.alignment_sum_us += other.alignment_sum_us;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub scheme: SchemeKind,
    pub per_ue: Vec<UeStats>,
    /// Frames per transmitter, summed over replications.
    pub frames_simulated: u64,
    /// Seed of the first replication.
    pub seed: u64,
    pub replications: u32,
    /// Transmissions that overlapped a transmission of another transmitter.
    pub overlapping_cots: u64,
    /// Identifies the scenario independently of its seed.
    pub fingerprint: u64,
}

impl SimResult {
    /// Counters summed over all transmitters.
    pub fn pooled(&self) -> UeStats {
        let mut total = UeStats::default();
        for s in &self.per_ue {
            total.absorb(s);
        }
        total
    }

    /// Sum replications of one scenario.
    pub fn merge(results: &[SimResult]) -> Result<SimResult, SimError> {
        let (first, rest) = results.split_first().ok_or(SimError::Empty)?;
        let mut out = first.clone();
        for r in rest {
            if r.fingerprint != out.fingerprint || r.per_ue.len() != out.per_ue.len() {
                return Err(SimError::MixedScenario);
            }
            for (a, b) in out.per_ue.iter_mut().zip(&r.per_ue) {
                a.absorb(b);
            }
            out.frames_simulated += r.frames_simulated;
            out.replications += r.replications;
            out.overlapping_cots += r.overlapping_cots;
        }
        Ok(out)
    }
}

/// Hash of everything in the scenario except the seed.
pub fn scenario_fingerprint(scenario: &ValidatedScenario) -> u64 {
    let unseeded = scenario.with_seed(0);
    let mut h = DefaultHasher::new();
    format!("{unseeded:?}").hash(&mut h);
    h.finish()
}
