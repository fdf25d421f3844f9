//! Fixed-frame-period geometry, transmitter and scenario descriptions, and
//! scenario validation.
//!
//! Every frame of an [`FfpConfig`] grid starts at `offset + k * period`
//! (`k >= 0`) and is split into a channel occupancy time followed by an idle
//! period. The single 25 us CCA observation slot occupies the last 25 us of
//! the idle period, so a successful assessment is followed by a frame start
//! with no gap.
//!
//! [`validate_scenario`] turns a [`ScenarioSpec`] into a [`ValidatedScenario`]
//! by materializing concrete grid offsets for every transmitter and checking
//! that no two CCA windows in the system overlap.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::{TimeMicros, CCA_DURATION, MIN_IDLE};

/// Frame periods an FBE device may be configured with.
pub const ALLOWED_PERIODS_US: [u64; 6] = [1000, 2000, 2500, 4000, 5000, 10000];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("UnsupportedPeriod: frame period {0} is not one of 1, 2, 2.5, 4, 5 or 10 ms")]
    UnsupportedPeriod(TimeMicros),
    #[error("CotTooLarge: COT {cot} exceeds 95% of the {period} frame period")]
    CotTooLarge { cot: TimeMicros, period: TimeMicros },
    #[error("IdleTooShort: idle period {idle} is below max(5% of {period}, 100 us)")]
    IdleTooShort { idle: TimeMicros, period: TimeMicros },
    #[error("OffsetOutOfRange: grid offset {offset} must be below the period {period}")]
    OffsetOutOfRange { offset: TimeMicros, period: TimeMicros },
    #[error(
        "InfeasibleIdlePeriod: with Q={q} transmitters and a {step} priority offset the idle \
         period must exceed {required}, got {idle}"
    )]
    InfeasibleIdlePeriod {
        q: usize,
        step: TimeMicros,
        required: TimeMicros,
        idle: TimeMicros,
    },
    #[error("NonDivisiblePeriod: frame period {period} is not divisible into {n} configurations")]
    NonDivisiblePeriod { period: TimeMicros, n: u32 },
    #[error("DuplicatePriority: priority rank {0} is assigned to more than one transmitter")]
    DuplicatePriority(u32),
    #[error("DuplicateTransmitter: transmitter id {0} appears more than once")]
    DuplicateTransmitter(u32),
    #[error("EmptyScenario: a scenario needs at least one transmitter")]
    EmptyScenario,
    #[error("ZeroHorizon: horizon_frames must be at least 1")]
    ZeroHorizon,
    #[error("InvalidProbability: p0 of transmitter {id} is {p0}, expected a value in [0, 1]")]
    InvalidProbability { id: u32, p0: f64 },
    #[error("InvalidConfigCount: transmitter {id}: {reason}")]
    InvalidConfigCount { id: u32, reason: String },
    #[error("PriorityStepTooSmall: priority offset {0} is shorter than one CCA slot")]
    PriorityStepTooSmall(TimeMicros),
    #[error(
        "PriorityStepTooLarge: {span} of accumulated priority offsets does not fit inside the \
         {cot} COT"
    )]
    PriorityStepTooLarge { span: TimeMicros, cot: TimeMicros },
    #[error("LatencyBudgetTooShort: transmitter {id} cannot complete a single CCA within {budget}")]
    LatencyBudgetTooShort { id: u32, budget: TimeMicros },
    #[error(
        "CcaOverlap: CCA windows of transmitter {first} and transmitter {second} overlap; \
         too many sensing occasions for the frame period"
    )]
    CcaOverlap { first: u32, second: u32 },
}

/// One CCA observation window `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CcaWindow {
    pub start: TimeMicros,
    pub end: TimeMicros,
}

impl CcaWindow {
    pub fn ending_at(end: TimeMicros) -> Self {
        CcaWindow {
            start: end - CCA_DURATION,
            end,
        }
    }

    pub fn shifted(self, by: TimeMicros) -> Self {
        CcaWindow {
            start: self.start + by,
            end: self.end + by,
        }
    }
}

impl fmt::Display for CcaWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start.0, self.end.0)
    }
}

/// One fixed-frame-period grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FfpConfig {
    period: TimeMicros,
    cot: TimeMicros,
    idle: TimeMicros,
    offset: TimeMicros,
}

impl FfpConfig {
    pub fn new(period: TimeMicros, cot: TimeMicros, offset: TimeMicros) -> Result<Self, ModelError> {
        if !ALLOWED_PERIODS_US.contains(&period.0) {
            return Err(ModelError::UnsupportedPeriod(period));
        }
        // cot <= 0.95 * period, kept in integers.
        if cot.0 >= period.0 || 20 * cot.0 > 19 * period.0 {
            return Err(ModelError::CotTooLarge { cot, period });
        }
        let idle = period - cot;
        if 20 * idle.0 < period.0 || idle < MIN_IDLE || idle < CCA_DURATION {
            return Err(ModelError::IdleTooShort { idle, period });
        }
        if offset >= period {
            return Err(ModelError::OffsetOutOfRange { offset, period });
        }
        Ok(FfpConfig {
            period,
            cot,
            idle,
            offset,
        })
    }

    pub fn period(&self) -> TimeMicros {
        self.period
    }

    pub fn cot(&self) -> TimeMicros {
        self.cot
    }

    pub fn idle(&self) -> TimeMicros {
        self.idle
    }

    pub fn offset(&self) -> TimeMicros {
        self.offset
    }

    pub fn with_offset(&self, offset: TimeMicros) -> Result<Self, ModelError> {
        FfpConfig::new(self.period, self.cot, offset)
    }

    /// End of the CCA window that closes frame `k`.
    #[inline]
    fn window_end(&self, k: u64) -> u64 {
        self.offset.0 + (k + 1) * self.period.0
    }

    /// First CCA window whose start is at or after `from`.
    #[inline]
    pub fn next_window(&self, from: TimeMicros) -> CcaWindow {
        let first_start = self.window_end(0) - CCA_DURATION.0;
        let k = if from.0 <= first_start {
            0
        } else {
            (from.0 - first_start).div_ceil(self.period.0)
        };
        CcaWindow::ending_at(TimeMicros(self.window_end(k)))
    }

    /// Relative position of `t` inside this grid's frame, in `[0, period)`.
    /// The grid is treated as extending periodically before its first frame.
    pub fn phase(&self, t: TimeMicros) -> u64 {
        let p = self.period.0;
        (t.0 % p + p - self.offset.0 % p) % p
    }

    /// Whether `[start, start + len)` lies entirely inside one COT of this grid.
    pub fn covers_with_cot(&self, start: TimeMicros, len: TimeMicros) -> bool {
        self.phase(start) + len.0 <= self.cot.0
    }

    /// Whether `[start, start + len)` lies entirely inside one idle period of this grid.
    pub fn covers_with_idle(&self, start: TimeMicros, len: TimeMicros) -> bool {
        let r = self.phase(start);
        r >= self.cot.0 && r + len.0 <= self.period.0
    }
}

/// The next `count` CCA windows of `config` whose start is at or after `from`.
pub fn cca_windows(config: &FfpConfig, from: TimeMicros, count: usize) -> Vec<CcaWindow> {
    let first = config.next_window(from);
    (0..count as u64)
        .map(|k| first.shifted(TimeMicros(k * config.period.0)))
        .collect()
}

/// Among `configs`, the one offering the earliest CCA window starting at or
/// after `t`. Ties go to the lowest index.
///
/// # Panics
///
/// Panics if `configs` is empty.
pub fn next_cca_after(configs: &[FfpConfig], t: TimeMicros) -> (usize, CcaWindow) {
    assert!(!configs.is_empty(), "next_cca_after needs at least one configuration");
    let mut best = (0, configs[0].next_window(t));
    for (i, c) in configs.iter().enumerate().skip(1) {
        let w = c.next_window(t);
        if w.start < best.1.start {
            best = (i, w);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// One grid per transmitter, retries one frame later.
    Conventional,
    /// Several time-shifted grids per transmitter; retries on the next grid.
    #[serde(alias = "multi")]
    MultiConfig,
    /// Grid offsets ordered by transmitter priority.
    #[serde(alias = "priority")]
    PriorityArranged,
    /// Idle period dropped after a failed CCA; the retry comes one COT later.
    #[serde(alias = "idle_reduction")]
    IdleReductionBaseline,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Conventional => "conventional",
            SchemeKind::MultiConfig => "multi_config",
            SchemeKind::PriorityArranged => "priority",
            SchemeKind::IdleReductionBaseline => "idle_reduction",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Index of the last frame in which a packet may still be sensed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KMax {
    Finite(u32),
    Unbounded,
}

/// Number of CCA attempts a packet may consume before it is dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttemptLimit {
    Finite(u32),
    Unbounded,
}

impl AttemptLimit {
    #[inline]
    pub fn permits(&self, done: u32) -> bool {
        match self {
            AttemptLimit::Finite(n) => done < *n,
            AttemptLimit::Unbounded => true,
        }
    }

    pub fn finite(&self) -> Option<u32> {
        match self {
            AttemptLimit::Finite(n) => Some(*n),
            AttemptLimit::Unbounded => None,
        }
    }

    fn min_finite(self, other: u32) -> AttemptLimit {
        match self {
            AttemptLimit::Finite(n) => AttemptLimit::Finite(n.min(other)),
            AttemptLimit::Unbounded => AttemptLimit::Finite(other),
        }
    }
}

impl fmt::Display for AttemptLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttemptLimit::Finite(n) => write!(f, "{n}"),
            AttemptLimit::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmitterSpec {
    pub id: u32,
    /// Probability of having no packet in a frame.
    pub p0: f64,
    pub k_max: KMax,
    pub n_configs: u32,
    /// Configurations usable inside the latency budget.
    pub m_budget: u32,
    /// 1 is the highest priority. Only read under [`SchemeKind::PriorityArranged`].
    pub priority_rank: u32,
    pub latency_budget: Option<TimeMicros>,
}

impl TransmitterSpec {
    /// A URLLC transmitter with a 1 ms budget and `n` configurations, all of
    /// them usable inside the budget.
    pub fn urllc(id: u32, p0: f64, n_configs: u32) -> Self {
        TransmitterSpec {
            id,
            p0,
            k_max: KMax::Finite(0),
            n_configs,
            m_budget: n_configs,
            priority_rank: id + 1,
            latency_budget: Some(TimeMicros(1000)),
        }
    }

    /// A delay-tolerant transmitter that senses until it gets the channel.
    pub fn best_effort(id: u32, p0: f64) -> Self {
        TransmitterSpec {
            id,
            p0,
            k_max: KMax::Unbounded,
            n_configs: 1,
            m_budget: 1,
            priority_rank: id + 1,
            latency_budget: None,
        }
    }
}

/// How grid offsets that do not land on whole microseconds are handled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffsetRounding {
    /// Reject a configuration count that does not divide the period.
    #[default]
    Exact,
    /// Round configuration offsets down to the microsecond grid.
    Floor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scheme: SchemeKind,
    pub transmitters: Vec<TransmitterSpec>,
    pub base_period: TimeMicros,
    pub cot: TimeMicros,
    pub priority_offset_step: TimeMicros,
    pub horizon_frames: u64,
    pub seed: u64,
    #[serde(default)]
    pub offset_rounding: OffsetRounding,
}

impl ScenarioSpec {
    pub fn q(&self) -> usize {
        self.transmitters.len()
    }
}

/// A scenario whose timing has been checked and whose grids are materialized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedScenario {
    spec: ScenarioSpec,
    grids: Vec<Vec<FfpConfig>>,
    attempts: Vec<AttemptLimit>,
}

impl ValidatedScenario {
    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn scheme(&self) -> SchemeKind {
        self.spec.scheme
    }

    pub fn q(&self) -> usize {
        self.spec.transmitters.len()
    }

    pub fn transmitters(&self) -> &[TransmitterSpec] {
        &self.spec.transmitters
    }

    /// Grids of transmitter `i` (by position), in configuration order.
    pub fn grids(&self, i: usize) -> &[FfpConfig] {
        &self.grids[i]
    }

    pub fn all_grids(&self) -> &[Vec<FfpConfig>] {
        &self.grids
    }

    /// Effective number of CCA attempts per packet of transmitter `i`.
    pub fn attempts(&self, i: usize) -> AttemptLimit {
        self.attempts[i]
    }

    pub fn period(&self) -> TimeMicros {
        self.spec.base_period
    }

    pub fn cot(&self) -> TimeMicros {
        self.spec.cot
    }

    pub fn horizon_frames(&self) -> u64 {
        self.spec.horizon_frames
    }

    pub fn seed(&self) -> u64 {
        self.spec.seed
    }

    /// Same scenario with another seed.
    pub fn with_seed(&self, seed: u64) -> ValidatedScenario {
        let mut v = self.clone();
        v.spec.seed = seed;
        v
    }

    /// Same scenario with another horizon.
    pub fn with_horizon(&self, horizon_frames: u64) -> ValidatedScenario {
        let mut v = self.clone();
        v.spec.horizon_frames = horizon_frames.max(1);
        v
    }

    /// Every CCA window of every transmitter whose start lies in `[from, to)`,
    /// tagged with the transmitter position.
    pub fn windows_between(&self, from: TimeMicros, to: TimeMicros) -> Vec<(usize, CcaWindow)> {
        let mut out = Vec::new();
        for (i, grids) in self.grids.iter().enumerate() {
            for g in grids {
                let mut w = g.next_window(from);
                while w.start < to {
                    out.push((i, w));
                    w = w.shifted(g.period());
                }
            }
        }
        out.sort_by_key(|(i, w)| (w.start, *i));
        out
    }
}

/// Number of attempts spaced `spacing_num / spacing_den` apart whose CCA
/// completes within `budget`, counted from the start of the first CCA.
fn attempts_within_budget(budget: TimeMicros, spacing_num: u64, spacing_den: u64) -> u32 {
    if budget < CCA_DURATION {
        return 0;
    }
    let slack = budget.0 - CCA_DURATION.0;
    (1 + slack * spacing_den / spacing_num).min(u32::MAX as u64) as u32
}

fn effective_attempts(
    scheme: SchemeKind,
    tx: &TransmitterSpec,
    period: TimeMicros,
    cot: TimeMicros,
) -> Result<AttemptLimit, ModelError> {
    let per_config = match tx.k_max {
        KMax::Finite(k) => Some(k.saturating_add(1)),
        KMax::Unbounded => None,
    };
    let base = match (scheme, per_config) {
        (SchemeKind::MultiConfig, Some(a)) => AttemptLimit::Finite(a.saturating_mul(tx.n_configs)),
        // A failed CCA is retried one COT later, as many times as fit in a frame.
        (SchemeKind::IdleReductionBaseline, Some(a)) => {
            AttemptLimit::Finite(a.saturating_mul(attempts_within_budget(period, cot.0, 1)))
        }
        (_, Some(a)) => AttemptLimit::Finite(a),
        (_, None) => AttemptLimit::Unbounded,
    };
    let Some(budget) = tx.latency_budget else {
        return Ok(base);
    };
    let fit = match scheme {
        SchemeKind::MultiConfig => attempts_within_budget(budget, period.0, tx.n_configs as u64),
        SchemeKind::IdleReductionBaseline => attempts_within_budget(budget, cot.0, 1),
        _ => attempts_within_budget(budget, period.0, 1),
    };
    if fit == 0 {
        return Err(ModelError::LatencyBudgetTooShort { id: tx.id, budget });
    }
    let limited = base.min_finite(fit);
    Ok(match scheme {
        SchemeKind::MultiConfig => limited.min_finite(tx.m_budget),
        _ => limited,
    })
}

fn check_transmitter(scheme: SchemeKind, tx: &TransmitterSpec) -> Result<(), ModelError> {
    if !(0.0..=1.0).contains(&tx.p0) || tx.p0.is_nan() {
        return Err(ModelError::InvalidProbability { id: tx.id, p0: tx.p0 });
    }
    let bad = |reason: &str| ModelError::InvalidConfigCount {
        id: tx.id,
        reason: reason.to_string(),
    };
    if tx.n_configs == 0 {
        return Err(bad("n_configs must be at least 1"));
    }
    if tx.m_budget == 0 {
        return Err(bad("m_budget must be at least 1"));
    }
    if tx.m_budget > tx.n_configs {
        return Err(bad("m_budget cannot exceed n_configs"));
    }
    if scheme != SchemeKind::MultiConfig && tx.n_configs != 1 {
        return Err(bad("only the multi_config scheme uses more than one configuration"));
    }
    Ok(())
}

/// Check a scenario and materialize the grid offsets of every transmitter.
///
/// * Conventional and idle-reduction: transmitter `i` of `Q` starts at
///   `floor(i * T / Q)`.
/// * Multi-config: transmitter `i` has base offset `floor(i * T / (n_max * Q))`
///   and its configuration `c` is shifted by `c * T / n`.
/// * Priority: the transmitter of `r`-th highest rank starts at
///   `(r - 1) * step`, so the highest rank senses inside everyone else's idle
///   period and each lower rank senses inside the COTs of all higher ranks.
pub fn validate_scenario(spec: ScenarioSpec) -> Result<ValidatedScenario, ModelError> {
    let q = spec.transmitters.len();
    if q == 0 {
        return Err(ModelError::EmptyScenario);
    }
    if spec.horizon_frames == 0 {
        return Err(ModelError::ZeroHorizon);
    }
    let period = spec.base_period;
    let template = FfpConfig::new(period, spec.cot, TimeMicros::ZERO)?;
    let idle = template.idle();

    let mut ids: Vec<u32> = spec.transmitters.iter().map(|t| t.id).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(ModelError::DuplicateTransmitter(w[0]));
    }
    for tx in &spec.transmitters {
        check_transmitter(spec.scheme, tx)?;
    }

    let p = period.0;
    let mut offsets: Vec<Vec<u64>> = Vec::with_capacity(q);
    match spec.scheme {
        SchemeKind::Conventional | SchemeKind::IdleReductionBaseline => {
            for i in 0..q as u64 {
                offsets.push(vec![i * p / q as u64]);
            }
        }
        SchemeKind::MultiConfig => {
            let n_max = spec.transmitters.iter().map(|t| t.n_configs).max().unwrap_or(1) as u64;
            for (i, tx) in spec.transmitters.iter().enumerate() {
                let n = tx.n_configs as u64;
                if !p.is_multiple_of(n) && spec.offset_rounding == OffsetRounding::Exact {
                    return Err(ModelError::NonDivisiblePeriod {
                        period,
                        n: tx.n_configs,
                    });
                }
                let base = i as u64 * p / (n_max * q as u64);
                offsets.push((0..n).map(|c| (base + c * p / n) % p).collect());
            }
        }
        SchemeKind::PriorityArranged => {
            let step = spec.priority_offset_step;
            let required = TimeMicros((q as u64 - 1) * step.0 + CCA_DURATION.0).max(MIN_IDLE);
            if idle <= required {
                return Err(ModelError::InfeasibleIdlePeriod {
                    q,
                    step,
                    required,
                    idle,
                });
            }
            if q > 1 && step < CCA_DURATION {
                return Err(ModelError::PriorityStepTooSmall(step));
            }
            let span = TimeMicros((q as u64 - 1) * step.0);
            if span > spec.cot {
                return Err(ModelError::PriorityStepTooLarge { span, cot: spec.cot });
            }
            let mut order: Vec<usize> = (0..q).collect();
            order.sort_by_key(|&i| spec.transmitters[i].priority_rank);
            if let Some(w) = order.windows(2).find(|w| {
                spec.transmitters[w[0]].priority_rank == spec.transmitters[w[1]].priority_rank
            }) {
                return Err(ModelError::DuplicatePriority(
                    spec.transmitters[w[0]].priority_rank,
                ));
            }
            offsets = vec![Vec::new(); q];
            for (pos, &i) in order.iter().enumerate() {
                offsets[i].push(pos as u64 * step.0);
            }
        }
    }

    let grids = offsets
        .iter()
        .map(|os| {
            os.iter()
                .map(|&o| template.with_offset(TimeMicros(o)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    check_cca_disjoint(&spec, &grids)?;

    let attempts = spec
        .transmitters
        .iter()
        .map(|tx| effective_attempts(spec.scheme, tx, period, spec.cot))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ValidatedScenario {
        spec,
        grids,
        attempts,
    })
}

/// All grids share one period, so windows are compared by their end phase
/// on the circle of length `period`.
fn check_cca_disjoint(spec: &ScenarioSpec, grids: &[Vec<FfpConfig>]) -> Result<(), ModelError> {
    let p = spec.base_period.0;
    let mut phases: Vec<(u64, u32)> = grids
        .iter()
        .zip(&spec.transmitters)
        .flat_map(|(gs, tx)| gs.iter().map(move |g| (g.offset().0 % p, tx.id)))
        .collect();
    phases.sort_unstable();
    for i in 0..phases.len() {
        let (a, ida) = phases[i];
        let (b, idb) = phases[(i + 1) % phases.len()];
        if phases.len() == 1 {
            break;
        }
        let gap = (b + p - a) % p;
        if gap < CCA_DURATION.0 {
            return Err(ModelError::CcaOverlap {
                first: ida,
                second: idb,
            });
        }
    }
    Ok(())
}

/// Whether the priority arrangement holds for every ordered pair: the CCA
/// windows of the higher rank fall inside idle periods of the lower rank,
/// and the CCA windows of the lower rank fall inside COTs of the higher rank.
pub fn priority_geometry_holds(scenario: &ValidatedScenario) -> bool {
    let txs = scenario.transmitters();
    let period = scenario.period();
    for (i, ti) in txs.iter().enumerate() {
        for (j, tj) in txs.iter().enumerate() {
            if ti.priority_rank >= tj.priority_rank {
                continue;
            }
            let gi = &scenario.grids(i)[0];
            let gj = &scenario.grids(j)[0];
            let wi = cca_windows(gi, period, 1)[0];
            let wj = cca_windows(gj, period, 1)[0];
            if !gj.covers_with_idle(wi.start, CCA_DURATION) {
                return false;
            }
            if !gi.covers_with_cot(wj.start, CCA_DURATION) {
                return false;
            }
        }
    }
    true
}

/// Whether `q` priority ranks `step` apart fit inside an idle period of `idle`.
pub fn priority_idle_feasible(q: usize, step: TimeMicros, idle: TimeMicros) -> bool {
    let needed = ((q.max(1) as u64 - 1) * step.0 + CCA_DURATION.0).max(MIN_IDLE.0);
    idle.0 > needed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(us: u64) -> TimeMicros {
        TimeMicros(us)
    }

    fn w(a: u64, b: u64) -> CcaWindow {
        CcaWindow {
            start: t(a),
            end: t(b),
        }
    }

    fn scenario(scheme: SchemeKind, q: u32, cot: u64, step: u64) -> ScenarioSpec {
        ScenarioSpec {
            scheme,
            transmitters: (0..q).map(|i| TransmitterSpec::urllc(i, 0.99, 1)).collect(),
            base_period: t(1000),
            cot: t(cot),
            priority_offset_step: t(step),
            horizon_frames: 10,
            seed: 1,
            offset_rounding: OffsetRounding::Exact,
        }
    }

    #[test]
    fn cca_windows_at_frame_ends() {
        let c = FfpConfig::new(t(1000), t(900), t(0)).unwrap();
        assert_eq!(cca_windows(&c, t(0), 2), vec![w(975, 1000), w(1975, 2000)]);
        let shifted = c.with_offset(t(500)).unwrap();
        assert_eq!(cca_windows(&shifted, t(0), 1), vec![w(1475, 1500)]);
        assert_eq!(cca_windows(&c, t(975), 1), vec![w(975, 1000)]);
        assert_eq!(cca_windows(&c, t(976), 1), vec![w(1975, 2000)]);
    }

    #[test]
    fn next_cca_picks_earliest_then_lowest_index() {
        let a = FfpConfig::new(t(1000), t(900), t(0)).unwrap();
        let b = a.with_offset(t(500)).unwrap();
        assert_eq!(next_cca_after(&[a, b], t(0)), (0, w(975, 1000)));
        assert_eq!(next_cca_after(&[a, b], t(1000)), (1, w(1475, 1500)));
        assert_eq!(next_cca_after(&[b], t(123_456)).0, 0);
        assert_eq!(next_cca_after(&[a, b], t(1475)), (1, w(1475, 1500)));
        assert_eq!(next_cca_after(&[a, a], t(10)).0, 0);
    }

    #[test]
    fn ffp_timing_limits() {
        assert!(matches!(
            FfpConfig::new(t(1000), t(951), t(0)),
            Err(ModelError::CotTooLarge { .. })
        ));
        assert!(FfpConfig::new(t(1000), t(900), t(0)).is_ok());
        assert!(matches!(
            FfpConfig::new(t(10_000), t(9_600), t(0)),
            Err(ModelError::CotTooLarge { .. })
        ));
        // 5% of 1 ms is below the 100 us floor.
        assert!(matches!(
            FfpConfig::new(t(1000), t(920), t(0)),
            Err(ModelError::IdleTooShort { .. })
        ));
        assert!(matches!(
            FfpConfig::new(t(1500), t(1000), t(0)),
            Err(ModelError::UnsupportedPeriod(_))
        ));
        assert!(matches!(
            FfpConfig::new(t(1000), t(900), t(1000)),
            Err(ModelError::OffsetOutOfRange { .. })
        ));
    }

    #[test]
    fn priority_table_timing_accepts_nine_rejects_ten() {
        let ok = validate_scenario(scenario(SchemeKind::PriorityArranged, 9, 650, 40)).unwrap();
        assert!(priority_geometry_holds(&ok));
        let err = validate_scenario(scenario(SchemeKind::PriorityArranged, 10, 650, 40)).unwrap_err();
        assert!(matches!(
            err,
            ModelError::InfeasibleIdlePeriod {
                q: 10,
                required: TimeMicros(385),
                idle: TimeMicros(350),
                ..
            }
        ));
    }

    #[test]
    fn single_conventional_transmitter_at_zero() {
        let v = validate_scenario(scenario(SchemeKind::Conventional, 1, 900, 0)).unwrap();
        assert_eq!(v.grids(0).len(), 1);
        assert_eq!(v.grids(0)[0].offset(), t(0));
        assert_eq!(v.attempts(0), AttemptLimit::Finite(1));
    }

    #[test]
    fn multi_config_divisibility() {
        let mut s = scenario(SchemeKind::MultiConfig, 2, 900, 0);
        for tx in &mut s.transmitters {
            tx.n_configs = 3;
            tx.m_budget = 3;
        }
        assert!(matches!(
            validate_scenario(s.clone()),
            Err(ModelError::NonDivisiblePeriod { n: 3, .. })
        ));
        s.offset_rounding = OffsetRounding::Floor;
        let v = validate_scenario(s).unwrap();
        let offs: Vec<u64> = v.grids(1).iter().map(|g| g.offset().0).collect();
        assert_eq!(offs, vec![166, 499, 832]);
        assert_eq!(v.attempts(0), AttemptLimit::Finite(3));
    }

    #[test]
    fn multi_config_offsets_and_attempts() {
        let mut s = scenario(SchemeKind::MultiConfig, 10, 900, 0);
        for tx in &mut s.transmitters {
            tx.n_configs = 4;
            tx.m_budget = 4;
        }
        let v = validate_scenario(s.clone()).unwrap();
        let offs: Vec<u64> = v.grids(3).iter().map(|g| g.offset().0).collect();
        assert_eq!(offs, vec![75, 325, 575, 825]);
        assert_eq!(v.attempts(9), AttemptLimit::Finite(4));
        // Eleven transmitters with four configurations cannot keep 25 us apart.
        s.transmitters.push(TransmitterSpec::urllc(10, 0.99, 4));
        assert!(matches!(
            validate_scenario(s),
            Err(ModelError::CcaOverlap { .. })
        ));
    }

    #[test]
    fn attempt_limits_follow_budget() {
        let mut s = scenario(SchemeKind::IdleReductionBaseline, 2, 900, 0);
        let v = validate_scenario(s.clone()).unwrap();
        assert_eq!(v.attempts(0), AttemptLimit::Finite(2));
        s.scheme = SchemeKind::Conventional;
        s.transmitters[0].k_max = KMax::Unbounded;
        s.transmitters[0].latency_budget = None;
        let v = validate_scenario(s.clone()).unwrap();
        assert_eq!(v.attempts(0), AttemptLimit::Unbounded);
        s.transmitters[0].k_max = KMax::Finite(3);
        let v = validate_scenario(s.clone()).unwrap();
        assert_eq!(v.attempts(0), AttemptLimit::Finite(4));
        s.transmitters[0].latency_budget = Some(t(3100));
        let v = validate_scenario(s.clone()).unwrap();
        assert_eq!(v.attempts(0), AttemptLimit::Finite(4));
        s.transmitters[0].latency_budget = Some(t(2024));
        let v = validate_scenario(s.clone()).unwrap();
        assert_eq!(v.attempts(0), AttemptLimit::Finite(2));
        s.transmitters[0].latency_budget = Some(t(20));
        assert!(matches!(
            validate_scenario(s),
            Err(ModelError::LatencyBudgetTooShort { .. })
        ));
    }

    #[test]
    fn validation_errors() {
        let mut s = scenario(SchemeKind::PriorityArranged, 3, 650, 40);
        s.transmitters[2].priority_rank = 1;
        assert_eq!(
            validate_scenario(s).unwrap_err(),
            ModelError::DuplicatePriority(1)
        );
        let s = scenario(SchemeKind::Conventional, 2, 960, 0);
        assert!(matches!(
            validate_scenario(s),
            Err(ModelError::CotTooLarge { .. })
        ));
        let mut s = scenario(SchemeKind::Conventional, 2, 900, 0);
        s.transmitters[1].p0 = 1.5;
        assert!(matches!(
            validate_scenario(s),
            Err(ModelError::InvalidProbability { .. })
        ));
        let mut s = scenario(SchemeKind::Conventional, 2, 900, 0);
        s.transmitters[1].n_configs = 2;
        assert!(matches!(
            validate_scenario(s),
            Err(ModelError::InvalidConfigCount { .. })
        ));
        let mut s = scenario(SchemeKind::Conventional, 2, 900, 0);
        s.transmitters.clear();
        assert_eq!(validate_scenario(s).unwrap_err(), ModelError::EmptyScenario);
        let s = scenario(SchemeKind::Conventional, 41, 900, 0);
        assert!(matches!(
            validate_scenario(s),
            Err(ModelError::CcaOverlap { .. })
        ));
    }

    #[test]
    fn priority_offsets_follow_rank_order() {
        let mut s = scenario(SchemeKind::PriorityArranged, 3, 650, 40);
        s.transmitters[0].priority_rank = 3;
        s.transmitters[1].priority_rank = 1;
        s.transmitters[2].priority_rank = 2;
        let v = validate_scenario(s).unwrap();
        let offs: Vec<u64> = (0..3).map(|i| v.grids(i)[0].offset().0).collect();
        assert_eq!(offs, vec![80, 0, 40]);
        assert!(priority_geometry_holds(&v));
    }
}
