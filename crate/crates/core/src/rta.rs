//! Response-time analysis for fixed-priority preemptive scheduling.

use crate::model::{TaskId, TaskSet};
use crate::time::Tick;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponseTime {
    pub task: TaskId,
    /// Worst-case response time, or `None` when the fixed point exceeds the
    /// deadline.
    pub bound: Option<Tick>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtaReport {
    pub response_times: Vec<ResponseTime>,
    pub schedulable: bool,
}

/// Iterate `R = e_i + Σ_{j ∈ hp(i)} ⌈R / p_j⌉ · e_j` from `R = e_i` until it
/// settles or passes the deadline. Sporadic tasks are analysed at their
/// minimum inter-arrival time.
pub fn response_time_analysis(ts: &TaskSet) -> RtaReport {
    let response_times: Vec<ResponseTime> = ts
        .tasks
        .iter()
        .map(|task| {
            let hp: Vec<(Tick, Tick)> = ts
                .higher_priority(task)
                .map(|t| (t.period, t.wcet))
                .collect();
            let mut r = task.wcet;
            let bound = loop {
                if r > task.deadline {
                    break None;
                }
                let next = task.wcet
                    + hp.iter()
                        .map(|&(p, e)| r.div_ceil(p) * e)
                        .sum::<Tick>();
                if next == r {
                    break Some(r);
                }
                r = next;
            };
            ResponseTime { task: task.id, bound }
        })
        .collect();
    let schedulable = response_times.iter().all(|r| r.bound.is_some());
    RtaReport {
        response_times,
        schedulable,
    }
}

/// Shortcut for [`response_time_analysis`] when only the verdict matters.
pub fn is_schedulable(ts: &TaskSet) -> bool {
    response_time_analysis(ts).schedulable
}
