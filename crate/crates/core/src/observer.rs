//! What the observer task can measure about its own execution.
//!
//! Each observer job spends its first `lambda` ticks of CPU polling a global
//! timer. A gap between two consecutive reads means it was preempted, which
//! closes the current execution interval; the unspent budget carries over to
//! the job's next slice. At tick resolution this is exactly "the front
//! `lambda` ticks of each job, split wherever the job's slices are split".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TaskId;
use crate::sim::{JobRelease, Slice, Trace, TraceSink};
use crate::time::{Interval, Tick};

/// One contiguous execution interval the observer recorded, in global ticks.
pub type ObservedInterval = Interval;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObserverConfig {
    pub observer: TaskId,
    /// Measurement budget per job.
    pub lambda: Tick,
    /// Observer WCET.
    pub wcet: Tick,
    pub attack_start: Tick,
    pub attack_duration: Tick,
}

impl ObserverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda > self.wcet {
            return Err(Error::InvalidParameter(format!(
                "lambda {} exceeds observer wcet {}",
                self.lambda, self.wcet
            )));
        }
        self.window_end()?;
        Ok(())
    }

    pub fn window_end(&self) -> Result<Tick> {
        self.attack_start
            .checked_add(self.attack_duration)
            .ok_or(Error::Overflow("attack window"))
    }
}

/// Streaming reconstruction; feed it simulator events.
#[derive(Clone, Debug)]
pub struct IntervalRecorder {
    observer: TaskId,
    lambda: Tick,
    window: (Tick, Tick),
    seen_observer: bool,
    budget: Tick,
    // Measured but not yet emitted: (job, raw interval).
    pending: Option<(u32, Interval)>,
    intervals: Vec<ObservedInterval>,
}

impl IntervalRecorder {
    pub fn new(cfg: &ObserverConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(IntervalRecorder {
            observer: cfg.observer,
            lambda: cfg.lambda,
            window: (cfg.attack_start, cfg.window_end()?),
            seen_observer: false,
            budget: 0,
            pending: None,
            intervals: Vec::new(),
        })
    }

    fn flush(&mut self) {
        if let Some((_, iv)) = self.pending.take() {
            if let Some(clipped) = iv.clip(self.window.0, self.window.1) {
                self.intervals.push(clipped);
            }
        }
    }

    pub fn finish(mut self) -> Result<Vec<ObservedInterval>> {
        self.flush();
        if !self.seen_observer {
            return Err(Error::MissingObserver(self.observer));
        }
        Ok(self.intervals)
    }
}

impl TraceSink for IntervalRecorder {
    fn release(&mut self, r: &JobRelease) {
        if r.task == self.observer {
            self.seen_observer = true;
            self.budget = self.lambda;
        }
    }

    fn slice(&mut self, s: &Slice) {
        if s.task != self.observer || self.budget == 0 {
            return;
        }
        let take = self.budget.min(s.span.len());
        self.budget -= take;
        let measured = Interval {
            start: s.span.start,
            end: s.span.start + take,
        };
        match &mut self.pending {
            // No timer gap between the two pieces: one interval.
            Some((job, iv)) if *job == s.job && iv.end == measured.start => iv.end = measured.end,
            _ => {
                self.flush();
                self.pending = Some((s.job, measured));
            }
        }
    }
}

/// Replay a recorded trace through an [`IntervalRecorder`].
pub fn reconstruct_intervals(trace: &Trace, cfg: &ObserverConfig) -> Result<Vec<ObservedInterval>> {
    let mut rec = IntervalRecorder::new(cfg)?;
    // Slices and releases are stored separately; merge them back in time
    // order, releases first at equal ticks.
    let mut releases = trace.releases.iter().filter(|r| r.task == cfg.observer).peekable();
    for s in trace.slices.iter().filter(|s| s.task == cfg.observer) {
        while let Some(r) = releases.next_if(|r| r.job <= s.job) {
            rec.release(r);
        }
        rec.slice(s);
    }
    for r in releases {
        rec.release(r);
    }
    rec.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{example_taskset, TaskSet, TaskSpec};
    use crate::sim::simulate;
    use crate::variation::Variation;

    fn cfg(observer: u32, lambda: Tick, wcet: Tick, start: Tick, duration: Tick) -> ObserverConfig {
        ObserverConfig {
            observer: TaskId(observer),
            lambda,
            wcet,
            attack_start: start,
            attack_duration: duration,
        }
    }

    fn iv(start: Tick, end: Tick) -> Interval {
        Interval { start, end }
    }

    #[test]
    fn example_intervals() {
        let trace = simulate(&example_taskset(), 50, &Variation::Deterministic).unwrap();
        let got = reconstruct_intervals(&trace, &cfg(2, 1, 2, 0, 50)).unwrap();
        assert_eq!(got, vec![iv(0, 1), iv(12, 13), iv(20, 21), iv(30, 31), iv(43, 44)]);
    }

    #[test]
    fn unpreempted_observer_full_budget() {
        let ts = TaskSet {
            tasks: vec![TaskSpec::periodic(1, 10, 3, 0, 1), TaskSpec::periodic(2, 50, 1, 45, 2)],
            observer: TaskId(1),
            victim: TaskId(2),
        };
        let trace = simulate(&ts, 40, &Variation::Deterministic).unwrap();
        let got = reconstruct_intervals(&trace, &cfg(1, 3, 3, 0, 40)).unwrap();
        assert_eq!(got, vec![iv(0, 3), iv(10, 13), iv(20, 23), iv(30, 33)]);
    }

    #[test]
    fn preempted_mid_budget_splits() {
        // hi(5,1,2) lands inside the observer's first job: observer runs 0-2,
        // preempted 2-3, resumes 3-5.
        let ts = TaskSet {
            tasks: vec![TaskSpec::periodic(1, 5, 1, 2, 2), TaskSpec::periodic(2, 10, 4, 0, 1)],
            observer: TaskId(2),
            victim: TaskId(1),
        };
        let trace = simulate(&ts, 10, &Variation::Deterministic).unwrap();
        let got = reconstruct_intervals(&trace, &cfg(2, 3, 4, 0, 10)).unwrap();
        assert_eq!(got, vec![iv(0, 2), iv(3, 4)]);
        assert_eq!(got.iter().map(Interval::len).sum::<Tick>(), 3);
    }

    #[test]
    fn window_truncates() {
        let trace = simulate(&example_taskset(), 50, &Variation::Deterministic).unwrap();
        let got = reconstruct_intervals(&trace, &cfg(2, 2, 2, 13, 30)).unwrap();
        // observer slices in the window: [12,14) cut to [13,14), [20,22), [30,32), [43,..) outside
        assert_eq!(got, vec![iv(13, 14), iv(20, 22), iv(30, 32)]);
    }

    #[test]
    fn zero_lambda_measures_nothing() {
        let trace = simulate(&example_taskset(), 50, &Variation::Deterministic).unwrap();
        assert!(reconstruct_intervals(&trace, &cfg(2, 0, 2, 0, 50)).unwrap().is_empty());
    }

    #[test]
    fn missing_observer() {
        let trace = simulate(&example_taskset(), 50, &Variation::Deterministic).unwrap();
        assert!(matches!(
            reconstruct_intervals(&trace, &cfg(9, 1, 2, 0, 50)),
            Err(Error::MissingObserver(TaskId(9)))
        ));
    }

    #[test]
    fn lambda_above_wcet_rejected() {
        assert!(cfg(2, 3, 2, 0, 10).validate().is_err());
    }
}
