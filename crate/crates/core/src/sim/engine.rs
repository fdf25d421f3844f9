use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::model::{next_cca_after, CcaWindow, FfpConfig, SchemeKind, ValidatedScenario};
use crate::time::TimeMicros;

use super::arrivals::ArrivalProcess;
use super::result::{scenario_fingerprint, SimResult, UeStats};
use super::timeline::{ChannelTimeline, Occupancy};

// Arrivals sort before CCAs at the same instant.
const ARRIVAL: u8 = 0;
const CCA: u8 = 1;

#[derive(Debug, Clone, Copy)]
struct Pending {
    attempts: u32,
    config: usize,
    window: CcaWindow,
}

struct Ue<'a> {
    grids: &'a [FfpConfig],
    arrivals: ArrivalProcess,
    pending: Option<Pending>,
    own_cot_end: TimeMicros,
    stats: UeStats,
}

/// Window of the next attempt after a busy CCA.
fn retry_window(scheme: SchemeKind, grids: &[FfpConfig], cot: TimeMicros, p: &Pending) -> (usize, CcaWindow) {
    match scheme {
        SchemeKind::MultiConfig => {
            let c = (p.config + 1) % grids.len();
            (c, grids[c].next_window(p.window.end))
        }
        SchemeKind::IdleReductionBaseline => (p.config, p.window.shifted(cot)),
        SchemeKind::Conventional | SchemeKind::PriorityArranged => {
            (p.config, p.window.shifted(grids[p.config].period()))
        }
    }
}

/// Simulate one replication of a scenario.
///
/// Events are processed in time order. A CCA is decided at the start of its
/// window against every transmission recorded so far; since a transmission
/// begins only when a CCA window ends, all transmissions that can overlap a
/// window are known by the time its start is reached.
pub fn run(scenario: &ValidatedScenario) -> SimResult {
    let scheme = scenario.scheme();
    let cot = scenario.cot();
    let mut heap: BinaryHeap<Reverse<(TimeMicros, u8, u32)>> = BinaryHeap::new();
    let mut ues: Vec<Ue> = (0..scenario.q())
        .map(|i| Ue {
            grids: scenario.grids(i),
            arrivals: ArrivalProcess::for_transmitter(scenario, i),
            pending: None,
            own_cot_end: TimeMicros::ZERO,
            stats: UeStats {
                ue_id: scenario.transmitters()[i].id,
                ..UeStats::default()
            },
        })
        .collect();
    for (i, ue) in ues.iter_mut().enumerate() {
        if let Some(t) = ue.arrivals.next() {
            heap.push(Reverse((t, ARRIVAL, i as u32)));
        }
    }

    let mut timeline = ChannelTimeline::new();
    let mut overlapping = 0u64;

    while let Some(Reverse((t, kind, i))) = heap.pop() {
        let i = i as usize;
        let ue = &mut ues[i];
        if kind == ARRIVAL {
            if let Some(next) = ue.arrivals.next() {
                heap.push(Reverse((next, ARRIVAL, i as u32)));
            }
            if ue.pending.is_some() {
                ue.stats.suppressed_arrivals += 1;
                continue;
            }
            ue.stats.packets += 1;
            if t < ue.own_cot_end {
                ue.stats.arrivals_in_own_cot += 1;
            }
            let (config, window) = next_cca_after(ue.grids, t);
            ue.stats.alignment_sum_us += (window.start - t).0;
            ue.pending = Some(Pending {
                attempts: 0,
                config,
                window,
            });
            heap.push(Reverse((window.start, CCA, i as u32)));
            continue;
        }

        let mut p = ue.pending.expect("CCA event without a pending packet");
        timeline.prune(t);
        p.attempts += 1;
        ue.stats.cca_attempts += 1;
        if !timeline.is_busy(p.window, i) {
            let occ = Occupancy {
                ue: i,
                start: p.window.end,
                end: p.window.end + cot,
            };
            if timeline.record(occ) {
                overlapping += 1;
            }
            ue.own_cot_end = occ.end;
            ue.stats.tx_success += 1;
            ue.pending = None;
            continue;
        }
        ue.stats.busy_ccas += 1;
        if !scenario.attempts(i).permits(p.attempts) {
            ue.stats.drops += 1;
            ue.pending = None;
            continue;
        }
        let (config, window) = retry_window(scheme, ue.grids, cot, &p);
        p.config = config;
        p.window = window;
        ue.pending = Some(p);
        heap.push(Reverse((window.start, CCA, i as u32)));
    }

    SimResult {
        scheme,
        per_ue: ues.into_iter().map(|u| u.stats).collect(),
        frames_simulated: scenario.horizon_frames(),
        seed: scenario.seed(),
        replications: 1,
        overlapping_cots: overlapping,
        fingerprint: scenario_fingerprint(scenario),
    }
}
