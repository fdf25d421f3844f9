//! Frame-based-equipment channel access for low-latency traffic: timing
//! model, Markov-chain analysis, a discrete-event simulator and experiment
//! sweeps.

pub mod analytic;
pub mod config;
pub mod experiments;
pub mod model;
pub mod sim;
pub mod stats;
pub mod time;

pub use analytic::{
    alignment_time_mean, p_failure, p_trans, predict, priority_chain, solve_pc,
    solve_pc_with_background, stationary_distribution, AnalyticError, AnalyticResult,
    StationaryDistribution,
};
pub use config::{load_scenario, parse_scenario, ConfigError};
pub use model::{
    cca_windows, next_cca_after, validate_scenario, AttemptLimit, CcaWindow, FfpConfig, KMax,
    ModelError, OffsetRounding, ScenarioSpec, SchemeKind, TransmitterSpec, ValidatedScenario,
};
pub use sim::{run, run_replications, SimError, SimResult, UeStats};
pub use time::{TimeMicros, CCA_DURATION, MIN_IDLE};
