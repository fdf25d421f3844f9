//! Discrete-event simulation of FBE channel access on the microsecond grid.

mod arrivals;
mod engine;
mod result;
mod timeline;

use rayon::prelude::*;

use crate::model::ValidatedScenario;

pub use arrivals::{transmitter_rng, ArrivalProcess};
pub use engine::run;
pub use result::{scenario_fingerprint, SimError, SimResult, UeStats};
pub use timeline::{ChannelTimeline, Occupancy};

/// Run `replications` independent copies with seeds `seed, seed + 1, ...`
/// in parallel and merge them.
pub fn run_replications(scenario: &ValidatedScenario, replications: u32) -> SimResult {
    let base = scenario.seed();
    let results: Vec<SimResult> = (0..replications.max(1) as u64)
        .into_par_iter()
        .map(|r| run(&scenario.with_seed(base.wrapping_add(r))))
        .collect();
    SimResult::merge(&results).expect("replications share one scenario")
}
