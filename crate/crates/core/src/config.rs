//! Scenario file format.
//!
//! A scenario file is flat TOML. Top-level keys describe the system and give
//! the default parameters of every transmitter; optional `[ue.N]` sections
//! (1-based) override them for transmitter `N`:
//!
//! ```toml
//! scheme = "priority"          # conventional | multi_config | priority | idle_reduction
//! q = 3
//! p0 = 0.99
//! k_max = 0                    # or "inf"
//! n_configs = 1
//! m_budget = 1
//! period_us = 1000
//! cot_us = 650
//! priority_offset_us = 40
//! horizon_frames = 1000000
//! seed = 7
//! latency_budget_us = 1000     # optional
//! offset_rounding = "exact"    # optional: exact | floor
//!
//! [ue.3]
//! p0 = 0.5
//! k_max = "inf"
//! priority = 3
//! ```
//!
//! Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::model::{KMax, OffsetRounding, ScenarioSpec, SchemeKind, TransmitterSpec};
use crate::time::TimeMicros;

pub const DEFAULT_SEED: u64 = 0x5eed_fbe0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read scenario file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario file: {0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawKMax {
    Int(u32),
    Text(String),
}

impl RawKMax {
    fn resolve(&self) -> Result<KMax, ConfigError> {
        match self {
            RawKMax::Int(k) => Ok(KMax::Finite(*k)),
            RawKMax::Text(s) if s.eq_ignore_ascii_case("inf") => Ok(KMax::Unbounded),
            RawKMax::Text(s) => Err(ConfigError::Invalid(format!(
                "k_max must be a non-negative integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    scheme: SchemeKind,
    q: usize,
    p0: f64,
    k_max: Option<RawKMax>,
    n_configs: Option<u32>,
    m_budget: Option<u32>,
    period_us: u64,
    cot_us: u64,
    priority_offset_us: Option<u64>,
    horizon_frames: u64,
    seed: Option<u64>,
    latency_budget_us: Option<u64>,
    offset_rounding: Option<OffsetRounding>,
    #[serde(default)]
    ue: BTreeMap<String, RawUe>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUe {
    p0: Option<f64>,
    k_max: Option<RawKMax>,
    n_configs: Option<u32>,
    m_budget: Option<u32>,
    priority: Option<u32>,
    latency_budget_us: Option<u64>,
}

/// Parse scenario text. The result still has to go through
/// [`crate::model::validate_scenario`].
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ConfigError> {
    let raw: RawScenario = toml::from_str(text)?;
    if raw.q == 0 {
        return Err(ConfigError::Invalid("q must be at least 1".into()));
    }
    let default_k = match &raw.k_max {
        Some(k) => k.resolve()?,
        None => KMax::Finite(0),
    };
    let default_n = raw.n_configs.unwrap_or(1);

    let mut overrides: BTreeMap<usize, RawUe> = BTreeMap::new();
    for (key, section) in raw.ue {
        let index: usize = key
            .parse()
            .map_err(|_| ConfigError::Invalid(format!("[ue.{key}]: section name must be a number")))?;
        if index == 0 || index > raw.q {
            return Err(ConfigError::Invalid(format!(
                "[ue.{index}]: transmitters are numbered 1..={}",
                raw.q
            )));
        }
        overrides.insert(index, section);
    }

    let mut transmitters = Vec::with_capacity(raw.q);
    for index in 1..=raw.q {
        let o = overrides.remove(&index).unwrap_or_default();
        let n_configs = o.n_configs.unwrap_or(default_n);
        let k_max = match &o.k_max {
            Some(k) => k.resolve()?,
            None => default_k,
        };
        transmitters.push(TransmitterSpec {
            id: (index - 1) as u32,
            p0: o.p0.unwrap_or(raw.p0),
            k_max,
            n_configs,
            m_budget: o.m_budget.or(raw.m_budget).unwrap_or(n_configs),
            priority_rank: o.priority.unwrap_or(index as u32),
            latency_budget: o
                .latency_budget_us
                .or(raw.latency_budget_us)
                .map(TimeMicros),
        });
    }

    Ok(ScenarioSpec {
        scheme: raw.scheme,
        transmitters,
        base_period: TimeMicros(raw.period_us),
        cot: TimeMicros(raw.cot_us),
        priority_offset_step: TimeMicros(raw.priority_offset_us.unwrap_or(0)),
        horizon_frames: raw.horizon_frames,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        offset_rounding: raw.offset_rounding.unwrap_or_default(),
    })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioSpec, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}
