use std::fmt;
use std::ops::{Add, Sub};

/// Simulated time in billionths of a time unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const TICKS_PER_UNIT: u64 = 1_000_000_000;
    pub const ZERO: SimTime = SimTime(0);
    pub const UNIT: SimTime = SimTime(Self::TICKS_PER_UNIT);

    /// Rounds to the nearest tick; negative or NaN inputs clamp to zero.
    pub fn from_units(x: f64) -> Self {
        if x.is_nan() || x <= 0.0 {
            SimTime::ZERO
        } else {
            SimTime((x * Self::TICKS_PER_UNIT as f64).round() as u64)
        }
    }

    pub fn as_units(self) -> f64 {
        self.0 as f64 / Self::TICKS_PER_UNIT as f64
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.0 / Self::TICKS_PER_UNIT;
        let r = self.0 % Self::TICKS_PER_UNIT;
        write!(f, "{q}.{r:09}")
    }
}
