//! Built-in experiment presets.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use super::output::{emit_plot_data, write_csv, write_manifest, Manifest, OutputError};
use super::{run_sweep, ComparisonRow, SweepAxis, SweepSpec};
use crate::model::{OffsetRounding, ScenarioSpec, SchemeKind, TransmitterSpec};
use crate::time::TimeMicros;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig7,
    Fig8,
    Fig15,
    Fig16,
    Fig17,
    Fig22,
    Fig23,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown preset {0:?}; expected one of fig7, fig8, fig15, fig16, fig17, fig22, fig23")]
pub struct UnknownPreset(pub String);

impl FromStr for Preset {
    type Err = UnknownPreset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| UnknownPreset(s.to_string()))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

const PERIOD: TimeMicros = TimeMicros(1000);
const LONG_COT: TimeMicros = TimeMicros(900);
const PRIORITY_COT: TimeMicros = TimeMicros(650);
const PRIORITY_STEP: TimeMicros = TimeMicros(40);
// Ten priority ranks 40 us apart need more idle time than a 650 us COT leaves.
const COEXISTENCE_PRIORITY_COT: TimeMicros = TimeMicros(600);
const URLLC_COUNTS: std::ops::RangeInclusive<usize> = 2..=10;

fn scenario(scheme: SchemeKind, cot: TimeMicros, seed: u64) -> ScenarioSpec {
    ScenarioSpec {
        scheme,
        transmitters: Vec::new(),
        base_period: PERIOD,
        cot,
        priority_offset_step: PRIORITY_STEP,
        horizon_frames: 1,
        seed,
        offset_rounding: OffsetRounding::Floor,
    }
}

struct Builder {
    frames: u64,
    replications: u32,
    seed: u64,
}

impl Builder {
    fn sweep(&self, base: ScenarioSpec, template: TransmitterSpec, qs: Vec<usize>) -> SweepSpec {
        SweepSpec {
            q: qs.first().copied().unwrap_or(1),
            base,
            template,
            background: Vec::new(),
            axis: SweepAxis::Q(qs),
            frames_per_point: self.frames,
            replications: self.replications,
        }
    }

    fn multi(&self, p0: f64, n: u32) -> SweepSpec {
        self.sweep(
            scenario(SchemeKind::MultiConfig, LONG_COT, self.seed),
            TransmitterSpec::urllc(0, p0, n),
            URLLC_COUNTS.collect(),
        )
    }

    fn single(&self, scheme: SchemeKind, p0: f64) -> SweepSpec {
        self.sweep(
            scenario(scheme, LONG_COT, self.seed),
            TransmitterSpec::urllc(0, p0, 1),
            URLLC_COUNTS.collect(),
        )
    }

    fn priority(&self, p0: f64) -> SweepSpec {
        self.sweep(
            scenario(SchemeKind::PriorityArranged, PRIORITY_COT, self.seed),
            TransmitterSpec::urllc(0, p0, 1),
            vec![9],
        )
    }
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig7,
        Preset::Fig8,
        Preset::Fig15,
        Preset::Fig16,
        Preset::Fig17,
        Preset::Fig22,
        Preset::Fig23,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig15 => "fig15",
            Preset::Fig16 => "fig16",
            Preset::Fig17 => "fig17",
            Preset::Fig22 => "fig22",
            Preset::Fig23 => "fig23",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Preset::Fig7 => "1 to 4 configurations per transmitter, p0 = 0.99",
            Preset::Fig8 => "1 to 4 configurations per transmitter, p0 = 0.95",
            Preset::Fig15 => "priority-arranged grids, blocking per rank",
            Preset::Fig16 => "conventional vs 4 configurations vs priority, p0 = 0.99",
            Preset::Fig17 => "URLLC transmitters sharing the channel with one best-effort transmitter",
            Preset::Fig22 => "idle-reduction baseline vs 2 to 4 configurations, p0 = 0.99",
            Preset::Fig23 => "idle-reduction baseline vs 2 to 4 configurations, p0 = 0.95",
        }
    }

    pub fn sweeps(&self, frames: u64, replications: u32, seed: u64) -> Vec<SweepSpec> {
        let b = Builder {
            frames,
            replications,
            seed,
        };
        match self {
            Preset::Fig7 => (1..=4).map(|n| b.multi(0.99, n)).collect(),
            Preset::Fig8 => (1..=4).map(|n| b.multi(0.95, n)).collect(),
            Preset::Fig15 => vec![b.priority(0.99), b.priority(0.95)],
            Preset::Fig16 => vec![
                b.single(SchemeKind::Conventional, 0.99),
                b.multi(0.99, 4),
                b.priority(0.99),
            ],
            Preset::Fig17 => {
                let embb = TransmitterSpec::best_effort(0, 0.5);
                let mut multi = b.sweep(
                    scenario(SchemeKind::MultiConfig, LONG_COT, seed),
                    TransmitterSpec::urllc(0, 0.99, 4),
                    (1..=9).collect(),
                );
                multi.background = vec![embb.clone()];
                let mut prio = b.sweep(
                    scenario(SchemeKind::PriorityArranged, COEXISTENCE_PRIORITY_COT, seed),
                    TransmitterSpec::urllc(0, 0.99, 1),
                    vec![9],
                );
                prio.background = vec![embb];
                vec![multi, prio]
            }
            Preset::Fig22 | Preset::Fig23 => {
                let p0 = if *self == Preset::Fig22 { 0.99 } else { 0.95 };
                let mut v = vec![b.single(SchemeKind::IdleReductionBaseline, p0)];
                v.extend((2..=4).map(|n| b.multi(p0, n)));
                v
            }
        }
    }
}

/// Files and rows produced by one reproduction.
#[derive(Debug, Clone)]
pub struct Reproduction {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub rows: Vec<ComparisonRow>,
}

/// Run a preset and write `<out>/<tag>/<tag>.csv`, the series files and
/// `manifest.json`.
pub fn reproduce(
    preset: Preset,
    frames: u64,
    replications: u32,
    seed: u64,
    out: impl AsRef<Path>,
) -> Result<Reproduction, OutputError> {
    let dir = out.as_ref().join(preset.tag());
    fs::create_dir_all(&dir).map_err(|source| OutputError::Io {
        path: dir.clone(),
        source,
    })?;
    let sweeps = preset.sweeps(frames, replications, seed);
    let rows: Vec<ComparisonRow> = sweeps.iter().flat_map(run_sweep).collect();
    let table = dir.join(format!("{}.csv", preset.tag()));
    write_csv(&rows, &table)?;
    let mut files = vec![table];
    files.extend(emit_plot_data(&rows, &dir, preset.tag())?);
    let manifest_path = dir.join("manifest.json");
    let manifest = Manifest {
        preset: preset.tag().to_string(),
        frames_per_point: frames,
        replications,
        seed,
        sweeps,
        files: files
            .iter()
            .filter_map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        rows: rows.clone(),
    };
    write_manifest(&manifest, &manifest_path)?;
    files.push(manifest_path);
    Ok(Reproduction { dir, files, rows })
}
