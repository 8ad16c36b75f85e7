//! Integer time model.
//!
//! One unit of time is one timer tick. Intervals are half-open `[start, end)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in time or a duration, in timer ticks.
pub type Tick = u64;

/// Half-open tick interval `[start, end)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: Tick,
    pub end: Tick,
}

impl Interval {
    pub fn new(start: Tick, end: Tick) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidParameter(format!(
                "interval start {start} is after its end {end}"
            )));
        }
        Ok(Interval { start, end })
    }

    pub fn len(&self) -> Tick {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, t: Tick) -> bool {
        self.start <= t && t < self.end
    }

    /// True if `other` lies entirely inside `self`.
    pub fn covers(&self, other: &Interval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Intersection with `[lo, hi)`, or `None` when empty.
    pub fn clip(&self, lo: Tick, hi: Tick) -> Option<Interval> {
        let start = self.start.max(lo);
        let end = self.end.min(hi);
        (start < end).then_some(Interval { start, end })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

pub fn gcd(mut a: Tick, mut b: Tick) -> Tick {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Least common multiple, failing on overflow instead of wrapping.
pub fn lcm(a: Tick, b: Tick) -> Result<Tick> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidPeriod);
    }
    (a / gcd(a, b))
        .checked_mul(b)
        .ok_or(Error::Overflow("lcm"))
}

/// LCM of a whole list of periods (the hyperperiod).
pub fn hyperperiod<I: IntoIterator<Item = Tick>>(periods: I) -> Result<Tick> {
    periods.into_iter().try_fold(1, lcm)
}
