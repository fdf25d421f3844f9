//! Channel occupancy bookkeeping.

use std::collections::VecDeque;

use crate::model::CcaWindow;
use crate::time::TimeMicros;

/// One transmission `[start, end)` by transmitter position `ue`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occupancy {
    pub ue: usize,
    pub start: TimeMicros,
    pub end: TimeMicros,
}

impl Occupancy {
    fn overlaps(&self, start: TimeMicros, end: TimeMicros) -> bool {
        self.start < end && self.end > start
    }
}

/// Transmissions that may still affect a CCA, ordered by end time.
#[derive(Debug, Clone, Default)]
pub struct ChannelTimeline {
    active: VecDeque<Occupancy>,
}

impl ChannelTimeline {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// Drop transmissions that end at or before `t`.
    pub fn prune(&mut self, t: TimeMicros) {
        while self.active.front().is_some_and(|o| o.end <= t) {
            self.active.pop_front();
        }
    }

    /// Whether any transmitter other than `listener` occupies part of `window`.
    pub fn is_busy(&self, window: CcaWindow, listener: usize) -> bool {
        self.active
            .iter()
            .any(|o| o.ue != listener && o.overlaps(window.start, window.end))
    }

    /// Record a transmission. Returns `true` if it overlaps a transmission of
    /// another transmitter.
    pub fn record(&mut self, occ: Occupancy) -> bool {
        let clash = self
            .active
            .iter()
            .any(|o| o.ue != occ.ue && o.overlaps(occ.start, occ.end));
        let pos = self
            .active
            .iter()
            .rposition(|o| o.end <= occ.end)
            .map_or(0, |p| p + 1);
        self.active.insert(pos, occ);
        clash
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(ue: usize, s: u64, e: u64) -> Occupancy {
        Occupancy {
            ue,
            start: TimeMicros(s),
            end: TimeMicros(e),
        }
    }

    fn win(s: u64) -> CcaWindow {
        CcaWindow {
            start: TimeMicros(s),
            end: TimeMicros(s + 25),
        }
    }

    #[test]
    fn busy_only_for_other_transmitters() {
        let mut tl = ChannelTimeline::new();
        assert!(!tl.record(occ(0, 1000, 1900)));
        assert!(tl.is_busy(win(1500), 1));
        assert!(!tl.is_busy(win(1500), 0));
        assert!(tl.is_busy(win(1880), 1));
        assert!(!tl.is_busy(win(1900), 1));
        assert!(!tl.is_busy(win(975), 1));
        assert!(tl.is_busy(win(976), 1));
    }

    #[test]
    fn detects_overlap_and_prunes() {
        let mut tl = ChannelTimeline::new();
        tl.record(occ(0, 1000, 1900));
        assert!(tl.record(occ(1, 1500, 2400)));
        assert!(!tl.record(occ(1, 2400, 3300)));
        tl.prune(TimeMicros(1900));
        assert_eq!(tl.len(), 2);
        tl.prune(TimeMicros(5000));
        assert!(tl.is_empty());
    }
}
