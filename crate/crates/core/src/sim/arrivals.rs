//! Per-transmitter packet arrival process.
//!
//! Time is cut into periods `(W(k-1), W(k)]` where `W(k)` is the start of
//! the `k`-th CCA window of the transmitter's first grid. Each period holds a
//! packet with probability `1 - p0`, placed uniformly inside it. Empty
//! periods are skipped with a geometric draw rather than one Bernoulli draw
//! per period.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::model::ValidatedScenario;
use crate::time::TimeMicros;

/// Random stream of a transmitter: keyed by the run seed, with the stream
/// selected by the transmitter id so that adding a transmitter leaves the
/// others untouched.
pub fn transmitter_rng(seed: u64, ue_id: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ue_id as u64);
    rng
}

#[derive(Debug, Clone)]
pub struct ArrivalProcess {
    rng: ChaCha8Rng,
    skip: Option<Geometric>,
    boundary: u64,
    period: u64,
    horizon: u64,
    last: u64,
}

impl ArrivalProcess {
    /// Arrivals over periods `1..=horizon`, the first of which starts just after `boundary`.
    pub fn new(
        seed: u64,
        ue_id: u32,
        p0: f64,
        boundary: TimeMicros,
        period: TimeMicros,
        horizon: u64,
    ) -> Self {
        let a = 1.0 - p0;
        let skip = if a > 0.0 {
            Some(Geometric::new(a.min(1.0)).expect("arrival probability in (0, 1]"))
        } else {
            None
        };
        ArrivalProcess {
            rng: transmitter_rng(seed, ue_id),
            skip,
            boundary: boundary.0,
            period: period.0,
            horizon,
            last: 0,
        }
    }

    /// Arrival process of transmitter `i` (by position) of a scenario.
    pub fn for_transmitter(scenario: &ValidatedScenario, i: usize) -> Self {
        let tx = &scenario.transmitters()[i];
        let first = scenario.grids(i)[0].next_window(TimeMicros::ZERO);
        ArrivalProcess::new(
            scenario.seed(),
            tx.id,
            tx.p0,
            first.start,
            scenario.period(),
            scenario.horizon_frames(),
        )
    }
}

impl Iterator for ArrivalProcess {
    type Item = TimeMicros;

    fn next(&mut self) -> Option<TimeMicros> {
        let skip = self.skip.as_ref()?.sample(&mut self.rng);
        let k = self.last.saturating_add(1).saturating_add(skip);
        if k > self.horizon {
            self.last = self.horizon;
            self.skip = None;
            return None;
        }
        self.last = k;
        let period_start = self.boundary + (k - 1) * self.period;
        Some(TimeMicros(period_start + 1 + self.rng.gen_range(0..self.period)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrivals_stay_in_their_periods() {
        let p = TimeMicros(1000);
        let arr: Vec<_> = ArrivalProcess::new(5, 0, 0.0, TimeMicros(975), p, 50).collect();
        assert_eq!(arr.len(), 50);
        for (k, t) in arr.iter().enumerate() {
            let lo = 975 + (k as u64) * 1000;
            assert!(t.0 > lo && t.0 <= lo + 1000, "period {k}: {t}");
        }
    }

    #[test]
    fn silent_and_deterministic() {
        let p = TimeMicros(1000);
        assert_eq!(ArrivalProcess::new(5, 0, 1.0, TimeMicros(975), p, 50).count(), 0);
        let a: Vec<_> = ArrivalProcess::new(9, 3, 0.7, TimeMicros(975), p, 500).collect();
        let b: Vec<_> = ArrivalProcess::new(9, 3, 0.7, TimeMicros(975), p, 500).collect();
        let c: Vec<_> = ArrivalProcess::new(9, 4, 0.7, TimeMicros(975), p, 500).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn arrival_rate_matches_p0() {
        let n = ArrivalProcess::new(1, 0, 0.9, TimeMicros(975), TimeMicros(1000), 200_000).count();
        // mean 20000, sd ~134
        assert!((n as f64 - 20_000.0).abs() < 700.0, "{n}");
    }
}
