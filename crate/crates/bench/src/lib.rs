//! Benchmark fixtures.

use fbe_core::{
    validate_scenario, OffsetRounding, ScenarioSpec, SchemeKind, TimeMicros, TransmitterSpec,
    ValidatedScenario,
};

/// `q` identical low-latency transmitters on a 1 ms grid.
pub fn scenario(scheme: SchemeKind, q: u32, p0: f64, n: u32, frames: u64) -> ValidatedScenario {
    let cot = if scheme == SchemeKind::PriorityArranged { 650 } else { 900 };
    validate_scenario(ScenarioSpec {
        scheme,
        transmitters: (0..q).map(|i| TransmitterSpec::urllc(i, p0, n)).collect(),
        base_period: TimeMicros(1000),
        cot: TimeMicros(cot),
        priority_offset_step: TimeMicros(40),
        horizon_frames: frames,
        seed: 1,
        offset_rounding: OffsetRounding::Floor,
    })
    .expect("benchmark scenario is valid")
}
