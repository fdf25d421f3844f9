//! Integer microsecond time grid.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// Length of one clear-channel-assessment observation slot.
pub const CCA_DURATION: TimeMicros = TimeMicros(25);

/// Lower bound on the idle period regardless of frame length.
pub const MIN_IDLE: TimeMicros = TimeMicros(100);

/// A non-negative instant or duration in whole microseconds.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TimeMicros(pub u64);

impl TimeMicros {
    pub const ZERO: TimeMicros = TimeMicros(0);

    #[inline]
    pub const fn new(us: u64) -> Self {
        TimeMicros(us)
    }

    #[inline]
    pub const fn as_u64(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn saturating_sub(self, rhs: TimeMicros) -> TimeMicros {
        TimeMicros(self.0.saturating_sub(rhs.0))
    }
}

impl Add for TimeMicros {
    type Output = TimeMicros;

    #[inline]
    fn add(self, rhs: TimeMicros) -> TimeMicros {
        TimeMicros(self.0 + rhs.0)
    }
}

impl Sub for TimeMicros {
    type Output = TimeMicros;

    #[inline]
    fn sub(self, rhs: TimeMicros) -> TimeMicros {
        TimeMicros(self.0 - rhs.0)
    }
}

impl fmt::Display for TimeMicros {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} us", self.0)
    }
}

impl From<u64> for TimeMicros {
    fn from(us: u64) -> Self {
        TimeMicros(us)
    }
}
