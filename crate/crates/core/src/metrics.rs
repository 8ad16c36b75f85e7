//! Inference quality metrics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::time::Tick;

/// Exact recovery of the initial offset.
pub fn success(inferred: Tick, actual: Tick, _period: Tick) -> bool {
    inferred == actual
}

/// Precision ratio in `[0, 1]`: 1 for an exact hit, falling linearly to 0 at
/// half a period away, with distances beyond half a period folded back.
pub fn precision_ratio(inferred: Tick, actual: Tick, period: Tick) -> f64 {
    let eps = inferred.abs_diff(actual) as f64;
    let half = period as f64 / 2.0;
    let ratio = if eps > half {
        1.0 - (period as f64 - eps) / half
    } else {
        1.0 - eps / half
    };
    ratio.clamp(0.0, 1.0)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct RunOutcome {
    pub success: bool,
    pub precision: f64,
    /// `|inferred - actual|`; half the period when nothing survived.
    pub epsilon: Tick,
    /// Attack duration in units of `lcm(p_o, p_v)`.
    pub duration_units: f64,
}

impl RunOutcome {
    pub fn evaluate(inferred: Option<Tick>, actual: Tick, period: Tick, duration_units: f64) -> Self {
        match inferred {
            Some(a_hat) => RunOutcome {
                success: success(a_hat, actual, period),
                precision: precision_ratio(a_hat, actual, period),
                epsilon: a_hat.abs_diff(actual),
                duration_units,
            },
            None => RunOutcome {
                success: false,
                precision: 0.0,
                epsilon: period / 2,
                duration_units,
            },
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub success_rate: f64,
    pub precision_mean: f64,
    /// Sample standard deviation (0 for a single run).
    pub precision_sd: f64,
    pub precision_min: f64,
    pub precision_median: f64,
    pub precision_max: f64,
}

pub fn aggregate(outcomes: &[RunOutcome]) -> Result<Summary> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = outcomes.len();
    let nf = n as f64;
    let success_rate = outcomes.iter().filter(|o| o.success).count() as f64 / nf;
    let mean = outcomes.iter().map(|o| o.precision).sum::<f64>() / nf;
    let sd = if n > 1 {
        (outcomes.iter().map(|o| (o.precision - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted: Vec<f64> = outcomes.iter().map(|o| o.precision).collect();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    Ok(Summary {
        n,
        success_rate,
        precision_mean: mean,
        precision_sd: sd,
        precision_min: sorted[0],
        precision_median: median,
        precision_max: sorted[n - 1],
    })
}
