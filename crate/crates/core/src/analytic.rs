//! Markov-chain analysis of FBE channel access.
//!
//! A transmitter with a packet senses the channel at successive CCA
//! occasions. Each sensing finds the channel busy with probability `p_c`
//! (the blocking probability). With `A` allowed attempts the packet is sent
//! with probability `1 - p_c^A` and dropped otherwise. In a system of `Q`
//! transmitters, a CCA is idle only if none of the `Q - 1` competitors is
//! transmitting, which couples `p_c` to the per-frame transmission
//! probability `(1 - p0)(1 - p_c^A)` of every other transmitter:
//!
//! ```text
//! p_c = 1 - (1 - (1 - p0)(1 - p_c^A))^(Q - 1)
//! ```
//!
//! `A` is `K + 1` for the conventional scheme, `n (K + 1)` for `n` FFP
//! configurations, and `m` (or `1`) when a latency budget caps the attempts.
//! [`solve_pc`] finds the root by bisection; the map on the right-hand side is
//! non-increasing in `p_c`, so the root is unique.

use thiserror::Error;

use crate::model::{AttemptLimit, SchemeKind, ValidatedScenario};
use crate::time::TimeMicros;

/// Absolute tolerance on the fixed-point residual.
pub const SOLVER_TOLERANCE: f64 = 1e-12;
pub const SOLVER_MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("{name} = {value} is outside [0, 1]")]
    Domain { name: &'static str, value: f64 },
    #[error("the number of attempts must be at least 1")]
    ZeroAttempts,
    #[error("the number of transmitters must be at least 1")]
    ZeroTransmitters,
    #[error("bisection could not bracket the fixed point (g(0) = {g_lo}, g(1) = {g_hi})")]
    NoConvergence { g_lo: f64, g_hi: f64 },
    #[error("alignment time of the {0} scheme needs exactly one configuration")]
    ConfigCount(SchemeKind),
    #[error("no closed form for this transmitter mix: {0}")]
    UnsupportedMix(String),
}

fn check_prob(name: &'static str, value: f64) -> Result<(), AnalyticError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(AnalyticError::Domain { name, value })
    }
}

#[inline]
fn pow_attempts(x: f64, attempts: u32) -> f64 {
    match i32::try_from(attempts) {
        Ok(n) => x.powi(n),
        Err(_) => x.powf(attempts as f64),
    }
}

/// Stationary probabilities of the single-configuration chain, normalized so
/// that `pi_start = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pub pi_start: f64,
    pub pi_success: f64,
    /// Everything that returns to Start without a successful CCA, so that
    /// `pi_start = pi_success + pi_failure`.
    pub pi_failure: f64,
    /// `pi_0 .. pi_K`.
    pub pi_states: Vec<f64>,
}

pub fn stationary_distribution(p0: f64, p_c: f64, k: u32) -> Result<StationaryDistribution, AnalyticError> {
    check_prob("p0", p0)?;
    check_prob("p_c", p_c)?;
    let pi_start = 1.0;
    let pi0 = (1.0 - p0) * pi_start;
    let mut pi_states = Vec::with_capacity(k as usize + 1);
    let mut s = pi0;
    for _ in 0..=k {
        pi_states.push(s);
        s *= p_c;
    }
    let pi_success = pi_start * (1.0 - p0) * (1.0 - pow_attempts(p_c, k + 1));
    Ok(StationaryDistribution {
        pi_start,
        pi_success,
        pi_failure: pi_start - pi_success,
        pi_states,
    })
}

/// Probability that a packet is dropped after `attempts` busy CCAs.
pub fn p_failure(p_c: f64, attempts: u32) -> Result<f64, AnalyticError> {
    check_prob("p_c", p_c)?;
    if attempts == 0 {
        return Err(AnalyticError::ZeroAttempts);
    }
    Ok(pow_attempts(p_c, attempts))
}

/// Probability that a transmitter sends in a given frame.
pub fn p_trans(p0: f64, p_c: f64, attempts: u32) -> Result<f64, AnalyticError> {
    check_prob("p0", p0)?;
    Ok((1.0 - p0) * (1.0 - p_failure(p_c, attempts)?))
}

/// Per-frame transmission probability under an attempt limit. A transmitter
/// that never gives up sends every packet as long as the channel is not
/// permanently busy.
pub fn transmission_probability(p0: f64, p_c: f64, limit: AttemptLimit) -> f64 {
    match limit {
        AttemptLimit::Finite(a) => (1.0 - p0) * (1.0 - pow_attempts(p_c, a)),
        AttemptLimit::Unbounded if p_c < 1.0 => 1.0 - p0,
        AttemptLimit::Unbounded => 0.0,
    }
}

pub fn failure_probability(p_c: f64, limit: AttemptLimit) -> f64 {
    match limit {
        AttemptLimit::Finite(a) => pow_attempts(p_c, a),
        AttemptLimit::Unbounded if p_c < 1.0 => 0.0,
        AttemptLimit::Unbounded => 1.0,
    }
}

/// Fixed-point residual `g(x) = x - [1 - (1 - (1-p0)(1 - x^A))^(q-1) * prod(1 - b)]`.
pub fn fixed_point_residual(x: f64, p0: f64, attempts: u32, q: u32, background: &[f64]) -> f64 {
    let idle_from_peers = (1.0 - (1.0 - p0) * (1.0 - pow_attempts(x, attempts))).powi(q as i32 - 1);
    let idle_from_background: f64 = background.iter().map(|b| 1.0 - b).product();
    x - (1.0 - idle_from_peers * idle_from_background)
}

/// Blocking probability of `q` identical transmitters with `attempts` CCAs
/// per packet.
pub fn solve_pc(p0: f64, attempts: u32, q: u32) -> Result<f64, AnalyticError> {
    solve_pc_with_background(p0, attempts, q, &[])
}

/// As [`solve_pc`], with extra competitors whose per-frame transmission
/// probabilities `background` do not depend on `p_c`.
pub fn solve_pc_with_background(
    p0: f64,
    attempts: u32,
    q: u32,
    background: &[f64],
) -> Result<f64, AnalyticError> {
    check_prob("p0", p0)?;
    for &b in background {
        check_prob("background transmission probability", b)?;
    }
    if attempts == 0 {
        return Err(AnalyticError::ZeroAttempts);
    }
    if q == 0 {
        return Err(AnalyticError::ZeroTransmitters);
    }
    let g = |x: f64| fixed_point_residual(x, p0, attempts, q, background);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (g_lo, g_hi) = (g(lo), g(hi));
    if g_lo > 0.0 || g_hi < 0.0 {
        return Err(AnalyticError::NoConvergence { g_lo, g_hi });
    }
    if g_lo == 0.0 {
        return Ok(lo);
    }
    for _ in 0..SOLVER_MAX_ITERATIONS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if g(lo).abs() <= g(hi).abs() { lo } else { hi })
}

/// Blocking probabilities of `q` transmitters arranged by priority, highest
/// first. Transmitter `i` is blocked only by the transmissions of the
/// transmitters ranked above it.
pub fn priority_chain(p0: f64, q: usize) -> Vec<f64> {
    priority_chain_heterogeneous(&vec![p0; q])
}

/// [`priority_chain`] with a separate `p0` per rank (highest rank first).
pub fn priority_chain_heterogeneous(p0_by_rank: &[f64]) -> Vec<f64> {
    let limits = vec![AttemptLimit::Finite(1); p0_by_rank.len()];
    priority_chain_general(p0_by_rank, &limits)
}

fn priority_chain_general(p0_by_rank: &[f64], limits: &[AttemptLimit]) -> Vec<f64> {
    let mut out = Vec::with_capacity(p0_by_rank.len());
    let mut idle = 1.0;
    for (&p0, &limit) in p0_by_rank.iter().zip(limits) {
        let pc = 1.0 - idle;
        out.push(pc);
        idle *= 1.0 - transmission_probability(p0, pc, limit);
    }
    out
}

/// Mean wait from a uniformly placed arrival to the first CCA occasion.
pub fn alignment_time_mean(scheme: SchemeKind, period: TimeMicros, n: u32) -> Result<f64, AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::ZeroAttempts);
    }
    match scheme {
        SchemeKind::MultiConfig => Ok(period.0 as f64 / (2.0 * n as f64)),
        _ if n == 1 => Ok(period.0 as f64 / 2.0),
        other => Err(AnalyticError::ConfigCount(other)),
    }
}

/// Analytic prediction for every transmitter of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticResult {
    /// Blocking probability of the first transmitter.
    pub p_c: f64,
    pub p_trans: f64,
    pub p_failure: f64,
    pub per_ue_pc: Vec<f64>,
    pub per_ue_failure: Vec<f64>,
}

impl AnalyticResult {
    fn from_per_ue(scenario: &ValidatedScenario, per_ue_pc: Vec<f64>) -> Self {
        let per_ue_failure: Vec<f64> = per_ue_pc
            .iter()
            .enumerate()
            .map(|(i, &pc)| failure_probability(pc, scenario.attempts(i)))
            .collect();
        let tx0 = &scenario.transmitters()[0];
        AnalyticResult {
            p_c: per_ue_pc[0],
            p_trans: transmission_probability(tx0.p0, per_ue_pc[0], scenario.attempts(0)),
            p_failure: per_ue_failure[0],
            per_ue_pc,
            per_ue_failure,
        }
    }
}

/// Predict blocking and failure probabilities of every transmitter.
///
/// Priority scenarios use the rank chain. Other schemes use the coupled
/// fixed point, which needs all transmitters with a finite attempt limit to
/// share `p0` and the limit; transmitters that never give up enter as
/// background load `1 - p0`.
pub fn predict(scenario: &ValidatedScenario) -> Result<AnalyticResult, AnalyticError> {
    let txs = scenario.transmitters();
    let q = txs.len();
    if scenario.scheme() == SchemeKind::PriorityArranged {
        let mut order: Vec<usize> = (0..q).collect();
        order.sort_by_key(|&i| txs[i].priority_rank);
        let p0s: Vec<f64> = order.iter().map(|&i| txs[i].p0).collect();
        let limits: Vec<AttemptLimit> = order.iter().map(|&i| scenario.attempts(i)).collect();
        let chain = priority_chain_general(&p0s, &limits);
        let mut per_ue = vec![0.0; q];
        for (pos, &i) in order.iter().enumerate() {
            per_ue[i] = chain[pos];
        }
        return Ok(AnalyticResult::from_per_ue(scenario, per_ue));
    }

    let finite: Vec<usize> = (0..q)
        .filter(|&i| scenario.attempts(i).finite().is_some())
        .collect();
    let unbounded: Vec<usize> = (0..q).filter(|i| !finite.contains(i)).collect();
    let mut per_ue = vec![0.0; q];

    if let Some(&first) = finite.first() {
        let p0 = txs[first].p0;
        let attempts = scenario.attempts(first);
        if finite
            .iter()
            .any(|&i| txs[i].p0 != p0 || scenario.attempts(i) != attempts)
        {
            return Err(AnalyticError::UnsupportedMix(
                "transmitters with a finite attempt limit must share p0 and the limit".into(),
            ));
        }
        let a = attempts.finite().unwrap_or(1);
        let background: Vec<f64> = unbounded.iter().map(|&i| 1.0 - txs[i].p0).collect();
        let pc = solve_pc_with_background(p0, a, finite.len() as u32, &background)?;
        let tx_finite = transmission_probability(p0, pc, attempts);
        for &i in &finite {
            per_ue[i] = pc;
        }
        for &i in &unbounded {
            let others: f64 = unbounded
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| txs[j].p0)
                .product();
            per_ue[i] = 1.0 - (1.0 - tx_finite).powi(finite.len() as i32) * others;
        }
    } else {
        for &i in &unbounded {
            let others: f64 = (0..q).filter(|&j| j != i).map(|j| txs[j].p0).product();
            per_ue[i] = 1.0 - others;
        }
    }
    Ok(AnalyticResult::from_per_ue(scenario, per_ue))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_scenario, OffsetRounding, ScenarioSpec, TransmitterSpec};

    /// Stationary vector of the chain Start -> {0 | back-to-Start}, i -> {Success | i+1},
    /// K -> {Success | Failure}, Success/Failure -> Start, by Gaussian
    /// elimination on `pi (P - I) = 0` with `pi_start = 1`.
    fn chain_by_linear_solve(p0: f64, pc: f64, k: usize) -> (f64, f64, Vec<f64>) {
        // states: 0 = Start, 1..=k+1 = sensing states, k+2 = Success, k+3 = Failure
        let n = k + 4;
        let (succ, fail) = (k + 2, k + 3);
        let mut p = vec![vec![0.0; n]; n];
        p[0][1] = 1.0 - p0;
        p[0][fail] = p0;
        for i in 0..=k {
            let s = i + 1;
            p[s][succ] = 1.0 - pc;
            if i < k {
                p[s][s + 1] = pc;
            } else {
                p[s][fail] += pc;
            }
        }
        p[succ][0] = 1.0;
        p[fail][0] = 1.0;
        // Unknowns x_1..x_{n-1}, x_0 = 1. For each column j >= 1:
        // sum_i x_i P[i][j] - x_j = 0.
        let m = n - 1;
        let mut a = vec![vec![0.0; m + 1]; m];
        for j in 1..n {
            let row = j - 1;
            for i in 1..n {
                a[row][i - 1] = p[i][j];
            }
            a[row][j - 1] -= 1.0;
            a[row][m] = -p[0][j];
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
                .unwrap();
            a.swap(col, piv);
            let pivot = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != col {
                    let f = row[col] / pivot[col];
                    for (v, p) in row.iter_mut().zip(&pivot).skip(col) {
                        *v -= f * p;
                    }
                }
            }
        }
        let x: Vec<f64> = (0..m).map(|i| a[i][m] / a[i][i]).collect();
        (x[succ - 1], x[fail - 1], x[..=k].to_vec())
    }

    #[test]
    fn stationary_examples() {
        let d = stationary_distribution(0.0, 0.0, 0).unwrap();
        assert_eq!(d.pi_states, vec![1.0]);
        assert_eq!(d.pi_success, 1.0);
        assert_eq!(d.pi_failure, 0.0);

        let d = stationary_distribution(1.0, 0.7, 3).unwrap();
        assert_eq!(d.pi_states[0], 0.0);
        assert_eq!(d.pi_success, 0.0);

        let d = stationary_distribution(0.5, 0.5, 1).unwrap();
        assert_eq!(d.pi_states, vec![0.5, 0.25]);
        assert!((d.pi_success - 0.375).abs() < 1e-15);
        assert!(stationary_distribution(-0.1, 0.5, 1).is_err());
        assert!(stationary_distribution(0.5, 1.5, 1).is_err());
    }

    #[test]
    fn stationary_matches_linear_solve_for_small_chains() {
        for k in 0..=3u32 {
            for &(p0, pc) in &[(0.0, 0.0), (0.5, 0.5), (0.99, 0.01), (0.95, 0.3), (0.2, 0.9)] {
                let d = stationary_distribution(p0, pc, k).unwrap();
                let (succ, fail, states) = chain_by_linear_solve(p0, pc, k as usize);
                assert!((d.pi_success - succ).abs() < 1e-12, "k={k} p0={p0} pc={pc}");
                assert!((d.pi_failure - fail).abs() < 1e-12);
                for (a, b) in d.pi_states.iter().zip(&states) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn failure_examples() {
        assert_eq!(p_failure(0.3, 1).unwrap(), 0.3);
        assert!((p_failure(0.1, 4).unwrap() - 1e-4).abs() < 1e-18);
        assert_eq!(p_failure(0.0, 7).unwrap(), 0.0);
        assert_eq!(p_failure(0.3, 0), Err(AnalyticError::ZeroAttempts));
        assert!(p_failure(1.2, 1).is_err());
        assert!((p_trans(0.5, 0.5, 2).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn solve_pc_examples() {
        let pc = solve_pc(0.99, 1, 2).unwrap();
        assert!((pc - 0.01 / 1.01).abs() < 1e-12);
        let pc = solve_pc(0.99, 2, 2).unwrap();
        // p = 0.01 (1 - p^2)  =>  p = (-1 + sqrt(1 + 4e-4)) / 0.02
        let closed = (-1.0 + (1.0_f64 + 4.0e-4).sqrt()) / 0.02;
        assert!((pc - closed).abs() < 1e-12);
        assert!((pc * pc - 1.0e-4).abs() / 1.0e-4 < 0.05);
        for attempts in [1, 3, 8] {
            assert_eq!(solve_pc(0.3, attempts, 1).unwrap(), 0.0);
            assert_eq!(solve_pc(1.0, attempts, 7).unwrap(), 0.0);
        }
        assert_eq!(solve_pc(0.5, 0, 2), Err(AnalyticError::ZeroAttempts));
        assert_eq!(solve_pc(0.5, 1, 0), Err(AnalyticError::ZeroTransmitters));
        // Saturated system with one attempt: p = 1 - (p)^(q-1) at p0 = 0.
        let pc = solve_pc(0.0, 1, 2).unwrap();
        assert!((pc - 0.5).abs() < 1e-12);
    }

    #[test]
    fn background_load_raises_blocking() {
        let alone = solve_pc(0.99, 4, 3).unwrap();
        let loaded = solve_pc_with_background(0.99, 4, 3, &[0.5]).unwrap();
        assert!(loaded > alone);
        assert!(loaded >= 0.5);
        assert!(fixed_point_residual(loaded, 0.99, 4, 3, &[0.5]).abs() < 1e-12);
        // A single transmitter facing only background load sees exactly that load.
        let pc = solve_pc_with_background(0.99, 4, 1, &[0.5]).unwrap();
        assert!((pc - 0.5).abs() < 1e-12);
    }

    #[test]
    fn priority_chain_examples() {
        let c = priority_chain(0.99, 3);
        assert_eq!(c[0], 0.0);
        assert!((c[1] - 0.01).abs() < 1e-15);
        // 1 - p0 (1 - (1 - p0) p0)
        assert!((c[2] - (1.0 - 0.99 * (1.0 - 0.01 * 0.99))).abs() < 1e-15);
        assert!((c[2] - 0.019801).abs() < 1e-12);
        assert_eq!(priority_chain(0.7, 1), vec![0.0]);
        assert!(priority_chain(1.0, 6).iter().all(|&x| x == 0.0));
        let het = priority_chain_heterogeneous(&[0.9, 0.5, 0.99]);
        assert!((het[1] - 0.1).abs() < 1e-15);
        assert!((het[2] - (1.0 - 0.9 * (1.0 - 0.5 * 0.9))).abs() < 1e-15);
    }

    #[test]
    fn alignment_examples() {
        let p = TimeMicros(1000);
        assert_eq!(alignment_time_mean(SchemeKind::Conventional, p, 1).unwrap(), 500.0);
        assert_eq!(alignment_time_mean(SchemeKind::MultiConfig, p, 4).unwrap(), 125.0);
        assert_eq!(alignment_time_mean(SchemeKind::MultiConfig, p, 1).unwrap(), 500.0);
        assert!(alignment_time_mean(SchemeKind::Conventional, p, 2).is_err());
    }

    fn spec(scheme: SchemeKind, txs: Vec<TransmitterSpec>, cot: u64, step: u64) -> ScenarioSpec {
        ScenarioSpec {
            scheme,
            transmitters: txs,
            base_period: TimeMicros(1000),
            cot: TimeMicros(cot),
            priority_offset_step: TimeMicros(step),
            horizon_frames: 1,
            seed: 0,
            offset_rounding: OffsetRounding::Exact,
        }
    }

    #[test]
    fn predict_symmetric_multi_config() {
        let txs = (0..2).map(|i| TransmitterSpec::urllc(i, 0.99, 2)).collect();
        let v = validate_scenario(spec(SchemeKind::MultiConfig, txs, 900, 0)).unwrap();
        let r = predict(&v).unwrap();
        let pc = solve_pc(0.99, 2, 2).unwrap();
        assert_eq!(r.p_c, pc);
        assert_eq!(r.per_ue_failure, vec![pc * pc; 2]);
        assert!((r.p_trans - 0.01 * (1.0 - pc * pc)).abs() < 1e-15);
    }

    #[test]
    fn predict_priority_with_best_effort_tail() {
        let mut txs: Vec<_> = (0..3).map(|i| TransmitterSpec::urllc(i, 0.99, 1)).collect();
        txs.push(TransmitterSpec::best_effort(3, 0.5));
        let v = validate_scenario(spec(SchemeKind::PriorityArranged, txs, 650, 40)).unwrap();
        let r = predict(&v).unwrap();
        let chain = priority_chain(0.99, 4);
        assert_eq!(&r.per_ue_pc[..3], &chain[..3]);
        assert!((r.per_ue_pc[3] - chain[3]).abs() < 1e-15);
        assert_eq!(r.per_ue_failure[3], 0.0);
    }

    #[test]
    fn predict_multi_config_with_best_effort_background() {
        let mut txs: Vec<_> = (0..3).map(|i| TransmitterSpec::urllc(i, 0.99, 4)).collect();
        txs.push(TransmitterSpec::best_effort(3, 0.5));
        let v = validate_scenario(spec(SchemeKind::MultiConfig, txs, 900, 0)).unwrap();
        let r = predict(&v).unwrap();
        let pc = solve_pc_with_background(0.99, 4, 3, &[0.5]).unwrap();
        assert_eq!(r.per_ue_pc[0], pc);
        assert!((r.per_ue_failure[0] - pc.powi(4)).abs() < 1e-15);
        let tx = 0.01 * (1.0 - pc.powi(4));
        assert!((r.per_ue_pc[3] - (1.0 - (1.0 - tx).powi(3))).abs() < 1e-15);
    }

    #[test]
    fn predict_rejects_mixed_finite_classes() {
        let mut txs: Vec<_> = (0..2).map(|i| TransmitterSpec::urllc(i, 0.99, 1)).collect();
        txs[1].p0 = 0.95;
        let v = validate_scenario(spec(SchemeKind::Conventional, txs, 900, 0)).unwrap();
        assert!(matches!(predict(&v), Err(AnalyticError::UnsupportedMix(_))));
    }
}
