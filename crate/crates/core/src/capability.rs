//! Pre-attack analytics: how much of the ladder the observer can reach.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::time::{gcd, lcm, Tick};

/// Coverage ratio `e_o / gcd(p_o, p_v)`, kept as an exact fraction.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub observer_wcet: Tick,
    pub gcd: Tick,
}

impl Coverage {
    pub fn ratio(&self) -> f64 {
        self.observer_wcet as f64 / self.gcd as f64
    }

    /// The observer's execution reaches every ladder column.
    pub fn is_full(&self) -> bool {
        self.observer_wcet >= self.gcd
    }

    /// Smallest whole number of LCM periods that covers the ratio.
    pub fn ceil(&self) -> Tick {
        self.observer_wcet.div_ceil(self.gcd)
    }

    /// Compare against a threshold given to at most six decimal places,
    /// exactly, by cross-multiplying integers.
    pub fn cmp_real(&self, x: f64) -> Ordering {
        const SCALE: u128 = 1_000_000;
        let threshold = (x * SCALE as f64).round().max(0.0) as u128;
        (self.observer_wcet as u128 * SCALE).cmp(&(threshold * self.gcd as u128))
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.cmp_real(lo) != Ordering::Less && self.cmp_real(hi) != Ordering::Greater
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.observer_wcet, self.gcd)
    }
}

pub fn coverage_ratio(observer_wcet: Tick, observer_period: Tick, victim_period: Tick) -> Coverage {
    Coverage {
        observer_wcet,
        gcd: gcd(observer_period, victim_period),
    }
}

/// Smallest measurement budget that still reaches every column: the GCD when
/// coverage is full, otherwise the whole WCET.
pub fn choose_lambda(observer_wcet: Tick, observer_period: Tick, victim_period: Tick) -> Tick {
    let c = coverage_ratio(observer_wcet, observer_period, victim_period);
    if c.is_full() {
        c.gcd
    } else {
        observer_wcet
    }
}

/// `multiple · lcm(p_o, p_v)`: the observer/victim phase pattern repeats
/// every LCM.
pub fn attack_window(observer_period: Tick, victim_period: Tick, multiple: u64) -> Result<Tick> {
    if multiple == 0 {
        return Err(Error::InvalidParameter("window multiple must be at least 1".into()));
    }
    lcm(observer_period, victim_period)?
        .checked_mul(multiple)
        .ok_or(Error::Overflow("attack window"))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CapabilityReport {
    pub coverage: Coverage,
    pub recommended_lambda: Tick,
    /// `lcm(p_o, p_v)`.
    pub window: Tick,
    pub full_coverage: bool,
}

pub fn analyze_capability(observer_wcet: Tick, observer_period: Tick, victim_period: Tick) -> Result<CapabilityReport> {
    let coverage = coverage_ratio(observer_wcet, observer_period, victim_period);
    Ok(CapabilityReport {
        coverage,
        recommended_lambda: choose_lambda(observer_wcet, observer_period, victim_period),
        window: attack_window(observer_period, victim_period, 1)?,
        full_coverage: coverage.is_full(),
    })
}
