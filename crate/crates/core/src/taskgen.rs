//! Synthetic task set generation.
//!
//! Periods are drawn uniformly (and distinct) from a range, per-task
//! utilizations come from UUniFast for a total drawn uniformly inside the
//! requested utilization group, priorities are rate-monotonic, and the
//! observer is always the lowest-priority task. Candidates are rejected until
//! they are schedulable and meet the coverage constraint.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::capability::coverage_ratio;
use crate::error::{Error, Result};
use crate::model::{TaskId, TaskKind, TaskSet, TaskSpec};
use crate::rta::is_schedulable;
use crate::time::Tick;

/// Largest allowed gap between the achieved utilization (after rounding WCETs
/// to ticks) and the requested group.
pub const UTILIZATION_DRIFT: f64 = 0.02;

pub const TASK_COUNTS: [usize; 6] = [5, 7, 9, 11, 13, 15];

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VictimMode {
    /// Victim sits directly above the observer (priority 2).
    JustAboveObserver,
    /// Victim is the highest-priority task.
    Highest,
}

impl VictimMode {
    pub fn label(&self) -> &'static str {
        match self {
            VictimMode::JustAboveObserver => "low",
            VictimMode::Highest => "high",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverageConstraint {
    Any,
    /// Coverage ratio at least 1.
    Full,
    /// Coverage ratio inside `[lo, hi]`.
    Range(f64, f64),
}

/// `[0.001 + 0.1x, 0.1 + 0.1x]`.
pub fn group_bounds(index: u8) -> (f64, f64) {
    let x = index as f64;
    (0.001 + 0.1 * x, 0.1 + 0.1 * x)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Utilization group `x` in `0..=9`.
    pub util_group: u8,
    pub n_tasks: usize,
    pub sporadic_fraction: f64,
    pub period_range: (Tick, Tick),
    pub victim_mode: VictimMode,
    pub coverage: CoverageConstraint,
    pub max_attempts: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            util_group: 4,
            n_tasks: 5,
            sporadic_fraction: 0.5,
            period_range: (100, 1000),
            victim_mode: VictimMode::Highest,
            coverage: CoverageConstraint::Full,
            max_attempts: 1_000_000,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.util_group > 9 {
            return bad(format!("utilization group {} outside 0..=9", self.util_group));
        }
        if self.n_tasks < 2 {
            return bad("need at least an observer and a victim".into());
        }
        let (lo, hi) = self.period_range;
        if lo == 0 || lo > hi {
            return bad(format!("period range [{lo},{hi}] invalid"));
        }
        if ((hi - lo + 1) as usize) < self.n_tasks {
            return bad(format!("period range [{lo},{hi}] too small for {} distinct periods", self.n_tasks));
        }
        if !(0.0..=1.0).contains(&self.sporadic_fraction) {
            return bad(format!("sporadic fraction {} outside [0,1]", self.sporadic_fraction));
        }
        if let CoverageConstraint::Range(a, b) = self.coverage {
            if !(a >= 0.0 && a <= b) {
                return bad(format!("coverage range [{a},{b}] invalid"));
            }
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive".into());
        }
        Ok(())
    }

    /// Sporadic tasks per set. Observer and victim are always periodic.
    pub fn sporadic_count(&self) -> usize {
        ((self.sporadic_fraction * self.n_tasks as f64 + 1e-9).floor() as usize).min(self.n_tasks - 2)
    }
}

/// UUniFast: `n` utilizations summing to `total`, uniform over the simplex.
pub fn uunifast<R: Rng + ?Sized>(total: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let mut shares = Vec::with_capacity(n);
    let mut remaining = total;
    for i in (1..n).rev() {
        let next = remaining * rng.random::<f64>().powf(1.0 / i as f64);
        shares.push(remaining - next);
        remaining = next;
    }
    shares.push(remaining);
    shares
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Rejection {
    Drift,
    Coverage,
    Unschedulable,
}

impl Rejection {
    fn name(self) -> &'static str {
        match self {
            Rejection::Drift => "utilization drift",
            Rejection::Coverage => "coverage ratio",
            Rejection::Unschedulable => "unschedulable",
        }
    }
}

/// Generate one task set satisfying every constraint in `cfg`.
pub fn generate_taskset<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<TaskSet> {
    cfg.validate()?;
    let mut rejections = [0u64; 3];
    for _ in 0..cfg.max_attempts {
        match candidate(cfg, rng) {
            Ok(ts) => return Ok(ts),
            Err(r) => rejections[r as usize] += 1,
        }
    }
    let worst = [Rejection::Drift, Rejection::Coverage, Rejection::Unschedulable]
        .into_iter()
        .max_by_key(|&r| rejections[r as usize])
        .expect("non-empty");
    Err(Error::GenerationFailed {
        constraint: worst.name(),
        attempts: cfg.max_attempts,
    })
}

fn candidate<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> std::result::Result<TaskSet, Rejection> {
    let n = cfg.n_tasks;
    let (plo, phi) = cfg.period_range;
    let mut seen = HashSet::with_capacity(n);
    let mut periods = Vec::with_capacity(n);
    while periods.len() < n {
        let p = rng.random_range(plo..=phi);
        if seen.insert(p) {
            periods.push(p);
        }
    }

    let (ulo, uhi) = group_bounds(cfg.util_group);
    let target = rng.random_range(ulo..=uhi);
    let shares = uunifast(target, n, rng);

    let mut params: Vec<(Tick, Tick)> = periods
        .iter()
        .zip(&shares)
        .map(|(&p, &u)| (p, ((u * p as f64).round() as Tick).clamp(1, p)))
        .collect();
    // Rate-monotonic: shortest period first, highest priority.
    params.sort_by_key(|&(p, _)| p);

    let achieved: f64 = params.iter().map(|&(p, e)| e as f64 / p as f64).sum();
    if achieved < ulo - UTILIZATION_DRIFT || achieved > uhi + UTILIZATION_DRIFT {
        return Err(Rejection::Drift);
    }

    // index 0 = highest priority, n-1 = observer
    let observer_idx = n - 1;
    let victim_idx = match cfg.victim_mode {
        VictimMode::Highest => 0,
        VictimMode::JustAboveObserver => n - 2,
    };
    let (p_o, e_o) = params[observer_idx];
    let (p_v, _) = params[victim_idx];
    let coverage = coverage_ratio(e_o, p_o, p_v);
    let coverage_ok = match cfg.coverage {
        CoverageConstraint::Any => true,
        CoverageConstraint::Full => coverage.is_full(),
        CoverageConstraint::Range(lo, hi) => coverage.within(lo, hi),
    };
    if !coverage_ok {
        return Err(Rejection::Coverage);
    }

    let others: Vec<usize> = (0..n).filter(|&i| i != observer_idx && i != victim_idx).collect();
    let sporadic: HashSet<usize> = sample(rng, others.len(), cfg.sporadic_count())
        .into_iter()
        .map(|k| others[k])
        .collect();

    let tasks: Vec<TaskSpec> = params
        .iter()
        .enumerate()
        .map(|(i, &(p, e))| {
            let kind = if sporadic.contains(&i) {
                TaskKind::Sporadic
            } else {
                TaskKind::Periodic
            };
            let offset = rng.random_range(0..p);
            TaskSpec::new(i as u32 + 1, kind, p, e, offset, (n - i) as u32)
        })
        .collect();
    let ts = TaskSet {
        observer: TaskId(observer_idx as u32 + 1),
        victim: TaskId(victim_idx as u32 + 1),
        tasks,
    };
    if !is_schedulable(&ts) {
        return Err(Rejection::Unschedulable);
    }
    Ok(ts)
}
