//! Parameter sweeps comparing analytic predictions with simulation.

mod output;
mod presets;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::predict;
use crate::model::{validate_scenario, AttemptLimit, ScenarioSpec, SchemeKind, TransmitterSpec};
use crate::sim::{run_replications, SimResult, UeStats};
use crate::stats::{chi_square_homogeneity, within_binomial_radius, Z_997};

pub use output::{
    emit_plot_data, format_real, write_csv, write_manifest, Manifest, OutputError, CSV_HEADER,
};
pub use presets::{reproduce, Preset, Reproduction, UnknownPreset};

/// Points whose predicted number of failures is below this are not judged.
pub const MIN_EXPECTED_EVENTS: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Number of copies of the template transmitter.
    Q(Vec<usize>),
    NConfigs(Vec<u32>),
    P0(Vec<f64>),
}

impl SweepAxis {
    pub fn len(&self) -> usize {
        match self {
            SweepAxis::Q(v) => v.len(),
            SweepAxis::NConfigs(v) => v.len(),
            SweepAxis::P0(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A family of scenarios that differ along one axis.
///
/// Every point holds `q` copies of `template` (renumbered, ranked in order)
/// followed by `background`, which is appended unchanged apart from ids and
/// ranks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub base: ScenarioSpec,
    pub template: TransmitterSpec,
    pub background: Vec<TransmitterSpec>,
    pub q: usize,
    pub axis: SweepAxis,
    pub frames_per_point: u64,
    pub replications: u32,
}

impl SweepSpec {
    /// Sweep over `axis` with every transmitter of `base` taken as given
    /// except along the axis.
    pub fn from_scenario(base: ScenarioSpec, axis: SweepAxis, frames: u64, replications: u32) -> Self {
        let template = base
            .transmitters
            .first()
            .cloned()
            .unwrap_or_else(|| TransmitterSpec::urllc(0, 0.99, 1));
        let q = base.transmitters.len().max(1);
        SweepSpec {
            base,
            template,
            background: Vec::new(),
            q,
            axis,
            frames_per_point: frames,
            replications,
        }
    }

    fn transmitters(&self, q: usize, template: &TransmitterSpec) -> Vec<TransmitterSpec> {
        let mut out: Vec<TransmitterSpec> = Vec::with_capacity(q + self.background.len());
        for i in 0..q {
            out.push(TransmitterSpec {
                id: i as u32,
                priority_rank: i as u32 + 1,
                ..template.clone()
            });
        }
        for (j, b) in self.background.iter().enumerate() {
            let k = (q + j) as u32;
            out.push(TransmitterSpec {
                id: k,
                priority_rank: k + 1,
                ..b.clone()
            });
        }
        out
    }

    /// Scenario of every point, in axis order.
    pub fn points(&self) -> Vec<ScenarioSpec> {
        let with = |q: usize, template: &TransmitterSpec| ScenarioSpec {
            transmitters: self.transmitters(q, template),
            horizon_frames: self.frames_per_point,
            ..self.base.clone()
        };
        match &self.axis {
            SweepAxis::Q(qs) => qs.iter().map(|&q| with(q, &self.template)).collect(),
            SweepAxis::NConfigs(ns) => ns
                .iter()
                .map(|&n| {
                    let t = TransmitterSpec {
                        n_configs: n,
                        m_budget: n,
                        ..self.template.clone()
                    };
                    with(self.q, &t)
                })
                .collect(),
            SweepAxis::P0(ps) => ps
                .iter()
                .map(|&p0| {
                    let t = TransmitterSpec {
                        p0,
                        ..self.template.clone()
                    };
                    with(self.q, &t)
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "detail")]
pub enum RowStatus {
    /// Simulation inside the 99.7% binomial radius of the prediction.
    Agrees,
    /// Fewer than [`MIN_EXPECTED_EVENTS`] predicted failures.
    InsufficientEvents,
    /// Simulation outside the radius: the analytic model misses something
    /// the simulation captures.
    ModelGap,
    /// The point could not be built or predicted.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub scheme: SchemeKind,
    pub q: usize,
    /// 0 for a row pooled over all transmitters, otherwise 1-based position.
    pub ue_index: usize,
    pub p0: f64,
    pub attempts: AttemptLimit,
    pub n_configs: u32,
    pub p_fail_analytic: f64,
    pub p_fail_emp: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub drops: u64,
    pub packets: u64,
    pub frames: u64,
    pub seed: u64,
    pub status: RowStatus,
    /// Chi-square homogeneity p-value across the pooled transmitters.
    pub homogeneity_p: Option<f64>,
}

impl ComparisonRow {
    fn judge(&mut self) {
        let expected = self.p_fail_analytic * self.packets as f64;
        self.status = if expected < MIN_EXPECTED_EVENTS {
            RowStatus::InsufficientEvents
        } else if within_binomial_radius(self.p_fail_emp, self.p_fail_analytic, self.packets, Z_997) {
            RowStatus::Agrees
        } else {
            RowStatus::ModelGap
        };
    }

    fn from_stats(
        spec: &ScenarioSpec,
        ue_index: usize,
        tx: &TransmitterSpec,
        attempts: AttemptLimit,
        analytic: f64,
        stats: &UeStats,
        result: &SimResult,
    ) -> Self {
        let (ci_low, ci_high) = stats.ci(Z_997);
        let mut row = ComparisonRow {
            scheme: spec.scheme,
            q: spec.transmitters.len(),
            ue_index,
            p0: tx.p0,
            attempts,
            n_configs: tx.n_configs,
            p_fail_analytic: analytic,
            p_fail_emp: stats.p_failure_emp(),
            ci_low,
            ci_high,
            drops: stats.drops,
            packets: stats.packets,
            frames: result.frames_simulated,
            seed: result.seed,
            status: RowStatus::Agrees,
            homogeneity_p: None,
        };
        row.judge();
        row
    }

    fn failed(spec: &ScenarioSpec, reason: String) -> Self {
        let tx = spec.transmitters.first();
        ComparisonRow {
            scheme: spec.scheme,
            q: spec.transmitters.len(),
            ue_index: 0,
            p0: tx.map_or(f64::NAN, |t| t.p0),
            attempts: AttemptLimit::Finite(0),
            n_configs: tx.map_or(0, |t| t.n_configs),
            p_fail_analytic: f64::NAN,
            p_fail_emp: f64::NAN,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
            drops: 0,
            packets: 0,
            frames: 0,
            seed: spec.seed,
            status: RowStatus::Failed(reason),
            homogeneity_p: None,
        }
    }
}

/// Rows of one scenario: a single pooled row when every transmitter is
/// interchangeable, one row per transmitter otherwise.
pub fn evaluate_point(spec: &ScenarioSpec, replications: u32) -> Vec<ComparisonRow> {
    let scenario = match validate_scenario(spec.clone()) {
        Ok(v) => v,
        Err(e) => return vec![ComparisonRow::failed(spec, e.to_string())],
    };
    let analytic = match predict(&scenario) {
        Ok(a) => a,
        Err(e) => return vec![ComparisonRow::failed(spec, e.to_string())],
    };
    let result = run_replications(&scenario, replications);
    let txs = scenario.transmitters();
    let symmetric = scenario.scheme() != SchemeKind::PriorityArranged
        && (1..txs.len()).all(|i| {
            txs[i].p0 == txs[0].p0
                && scenario.attempts(i) == scenario.attempts(0)
                && txs[i].n_configs == txs[0].n_configs
        });
    if symmetric {
        let pooled = result.pooled();
        let mut row = ComparisonRow::from_stats(
            spec,
            0,
            &txs[0],
            scenario.attempts(0),
            analytic.p_failure,
            &pooled,
            &result,
        );
        let groups: Vec<(u64, u64)> = result.per_ue.iter().map(|s| (s.drops, s.packets)).collect();
        row.homogeneity_p = Some(chi_square_homogeneity(&groups));
        return vec![row];
    }
    (0..txs.len())
        .map(|i| {
            ComparisonRow::from_stats(
                spec,
                i + 1,
                &txs[i],
                scenario.attempts(i),
                analytic.per_ue_failure[i],
                &result.per_ue[i],
                &result,
            )
        })
        .collect()
}

/// Evaluate every point of a sweep. Points run in parallel; rows come back
/// in axis order, then by transmitter.
pub fn run_sweep(spec: &SweepSpec) -> Vec<ComparisonRow> {
    let points = spec.points();
    let replications = spec.replications.max(1);
    let per_point: Vec<Vec<ComparisonRow>> = points
        .par_iter()
        .map(|p| evaluate_point(p, replications))
        .collect();
    per_point.into_iter().flatten().collect()
}
