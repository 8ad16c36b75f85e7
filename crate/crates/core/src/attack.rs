//! End-to-end attack on one task set: simulate, reconstruct the observer's
//! intervals, fold them into the ladder, infer the victim offset, score it.

use serde::Serialize;

use crate::capability::{attack_window, choose_lambda};
use crate::error::{Error, Result};
use crate::ladder::{infer_arrival_column, InferenceResult, Ladder};
use crate::metrics::RunOutcome;
use crate::model::{validate_taskset, TaskId, TaskSet};
use crate::observer::{IntervalRecorder, ObservedInterval, ObserverConfig};
use crate::sim::{simulate_with_reservation, JobRelease, Reservation, TraceSink};
use crate::time::{lcm, Interval, Tick};
use crate::variation::Variation;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Duration {
    Ticks(Tick),
    /// Multiple of `lcm(p_o, p_v)`.
    LcmMultiple(u64),
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct AttackConfig {
    /// Ladder start and beginning of the observation window. Defaults to the
    /// observer's first release, when the attack code first gets to run.
    pub start: Option<Tick>,
    pub duration: Duration,
    /// Measurement budget per observer job; defaults to [`choose_lambda`].
    pub lambda: Option<Tick>,
    pub variation: Variation,
}

impl AttackConfig {
    pub fn new(duration: Duration, variation: Variation) -> Self {
        AttackConfig {
            start: None,
            duration,
            lambda: None,
            variation,
        }
    }
}

/// Everything the observer collected during one simulated run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    pub start: Tick,
    pub end: Tick,
    pub lambda: Tick,
    pub intervals: Vec<ObservedInterval>,
    /// Shortest execution any victim job received in the run.
    pub victim_min_demand: Option<Tick>,
}

#[derive(Default)]
struct MinDemand {
    task: Option<TaskId>,
    min: Option<Tick>,
}

impl TraceSink for MinDemand {
    fn release(&mut self, r: &JobRelease) {
        if Some(r.task) == self.task {
            self.min = Some(self.min.map_or(r.demand, |m| m.min(r.demand)));
        }
    }
}

fn resolve_lambda(ts: &TaskSet, lambda: Option<Tick>) -> Tick {
    let (o, v) = (ts.observer(), ts.victim());
    lambda.unwrap_or_else(|| choose_lambda(o.wcet, o.period, v.period))
}

/// Simulate `[0, end)` and record the observer's intervals within
/// `[start, end)`.
pub fn observe(ts: &TaskSet, start: Tick, end: Tick, lambda: Tick, variation: &Variation) -> Result<Observation> {
    validate_taskset(ts).into_result()?;
    if end <= start {
        return Err(Error::InvalidParameter(format!("empty attack window [{start},{end})")));
    }
    let o = ts.observer();
    let cfg = ObserverConfig {
        observer: o.id,
        lambda,
        wcet: o.wcet,
        attack_start: start,
        attack_duration: end - start,
    };
    let mut sink = (
        IntervalRecorder::new(&cfg)?,
        MinDemand {
            task: Some(ts.victim),
            min: None,
        },
    );
    let reservation = Reservation {
        task: o.id,
        ticks: lambda,
    };
    simulate_with_reservation(ts, end, variation, Some(reservation), &mut sink)?;
    let (recorder, demand) = sink;
    Ok(Observation {
        start,
        end,
        lambda,
        intervals: recorder.finish()?,
        victim_min_demand: demand.min,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackReport {
    pub lambda: Tick,
    pub start: Tick,
    pub duration: Tick,
    /// `lcm(p_o, p_v)`.
    pub lcm: Tick,
    pub intervals_observed: usize,
    pub true_offset: Tick,
    pub inference: InferenceResult,
    pub outcome: RunOutcome,
}

impl AttackReport {
    pub fn inferred_offset(&self) -> Option<Tick> {
        if self.intervals_observed == 0 {
            None
        } else {
            self.inference.estimate.map(|e| e.offset)
        }
    }
}

/// Run the whole pipeline once.
pub fn run_attack(ts: &TaskSet, cfg: &AttackConfig) -> Result<AttackReport> {
    validate_taskset(ts).into_result()?;
    let (o, v) = (ts.observer(), ts.victim());
    let duration = match cfg.duration {
        Duration::Ticks(d) => d,
        Duration::LcmMultiple(k) => attack_window(o.period, v.period, k)?,
    };
    let start = cfg.start.unwrap_or(o.offset);
    let end = start.checked_add(duration).ok_or(Error::Overflow("attack window"))?;
    let lambda = resolve_lambda(ts, cfg.lambda);
    let obs = observe(ts, start, end, lambda, &cfg.variation)?;
    let mut reports = evaluate_windows(ts, &obs, &[end])?;
    Ok(reports.pop().expect("one window"))
}

/// One simulation, scored at several attack durations given as multiples of
/// `lcm(p_o, p_v)`. Identical to separate [`run_attack`] calls with the same
/// seed, since a longer run extends a shorter one.
pub fn run_attack_sweep(
    ts: &TaskSet,
    multiples: &[u64],
    lambda: Option<Tick>,
    start: Option<Tick>,
    variation: &Variation,
) -> Result<Vec<AttackReport>> {
    validate_taskset(ts).into_result()?;
    let (o, v) = (ts.observer(), ts.victim());
    let start = start.unwrap_or(o.offset);
    let ends = multiples
        .iter()
        .map(|&k| {
            attack_window(o.period, v.period, k)?
                .checked_add(start)
                .ok_or(Error::Overflow("attack window"))
        })
        .collect::<Result<Vec<_>>>()?;
    let end = *ends.iter().max().ok_or(Error::EmptyInput)?;
    let lambda = resolve_lambda(ts, lambda);
    let obs = observe(ts, start, end, lambda, variation)?;
    evaluate_windows(ts, &obs, &ends)
}

/// Score `obs` truncated at each of `ends`.
pub fn evaluate_windows(ts: &TaskSet, obs: &Observation, ends: &[Tick]) -> Result<Vec<AttackReport>> {
    let (o, v) = (ts.observer(), ts.victim());
    let unit = lcm(o.period, v.period)?;
    ends.iter()
        .map(|&end| {
            let visible: Vec<Interval> = obs
                .intervals
                .iter()
                .filter_map(|iv| iv.clip(obs.start, end))
                .collect();
            let mut ladder = Ladder::new(v.period, obs.start)?;
            ladder.mark_intervals(&visible)?;
            let inference = infer_arrival_column(&ladder);
            let duration = end - obs.start;
            let mut report = AttackReport {
                lambda: obs.lambda,
                start: obs.start,
                duration,
                lcm: unit,
                intervals_observed: visible.len(),
                true_offset: v.offset,
                inference,
                outcome: RunOutcome::evaluate(None, v.offset, v.period, duration as f64 / unit as f64),
            };
            report.outcome = RunOutcome::evaluate(
                report.inferred_offset(),
                v.offset,
                v.period,
                duration as f64 / unit as f64,
            );
            Ok(report)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::example_taskset;
    use crate::variation::VariationConfig;

    #[test]
    fn example_end_to_end() {
        let cfg = AttackConfig {
            start: Some(0),
            duration: Duration::Ticks(50),
            lambda: Some(1),
            variation: Variation::Deterministic,
        };
        let r = run_attack(&example_taskset(), &cfg).unwrap();
        assert_eq!(r.intervals_observed, 5);
        assert_eq!(r.inferred_offset(), Some(1));
        assert!(r.outcome.success);
        assert_eq!(r.outcome.precision, 1.0);
    }

    #[test]
    fn sweep_matches_individual_runs() {
        let ts = example_taskset();
        let var = Variation::Random(VariationConfig::with_seed(3));
        let sweep = run_attack_sweep(&ts, &[1, 2, 3], None, None, &var).unwrap();
        for (k, r) in [1u64, 2, 3].iter().zip(&sweep) {
            let single = run_attack(&ts, &AttackConfig::new(Duration::LcmMultiple(*k), var)).unwrap();
            assert_eq!(&single, r);
        }
    }

    #[test]
    fn starved_observer_is_a_failure() {
        let cfg = AttackConfig {
            start: Some(4),
            duration: Duration::Ticks(5),
            lambda: Some(1),
            variation: Variation::Deterministic,
        };
        // observer runs nowhere in [4, 9)
        let r = run_attack(&example_taskset(), &cfg).unwrap();
        assert_eq!(r.intervals_observed, 0);
        assert_eq!(r.inferred_offset(), None);
        assert!(!r.outcome.success);
        assert_eq!(r.outcome.precision, 0.0);
    }
}
