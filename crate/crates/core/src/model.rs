//! Task model shared by every other module.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::time::Tick;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u32);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fixed priority. A larger number means a higher priority.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Priority(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Periodic,
    /// `period` is the minimum inter-arrival time.
    Sporadic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: TaskId,
    pub kind: TaskKind,
    pub period: Tick,
    pub deadline: Tick,
    pub wcet: Tick,
    pub offset: Tick,
    pub priority: Priority,
}

impl TaskSpec {
    /// Implicit-deadline task (`deadline == period`).
    pub fn new(
        id: u32,
        kind: TaskKind,
        period: Tick,
        wcet: Tick,
        offset: Tick,
        priority: u32,
    ) -> Self {
        TaskSpec {
            id: TaskId(id),
            kind,
            period,
            deadline: period,
            wcet,
            offset,
            priority: Priority(priority),
        }
    }

    pub fn periodic(id: u32, period: Tick, wcet: Tick, offset: Tick, priority: u32) -> Self {
        Self::new(id, TaskKind::Periodic, period, wcet, offset, priority)
    }

    pub fn sporadic(id: u32, period: Tick, wcet: Tick, offset: Tick, priority: u32) -> Self {
        Self::new(id, TaskKind::Sporadic, period, wcet, offset, priority)
    }

    pub fn utilization(&self) -> f64 {
        self.wcet as f64 / self.period as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSet {
    pub tasks: Vec<TaskSpec>,
    pub observer: TaskId,
    pub victim: TaskId,
}

impl TaskSet {
    pub fn task(&self, id: TaskId) -> Option<&TaskSpec> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn index_of(&self, id: TaskId) -> Option<usize> {
        self.tasks.iter().position(|t| t.id == id)
    }

    /// # Panics
    /// If the observer id is not in the task list; call after validation.
    pub fn observer(&self) -> &TaskSpec {
        self.task(self.observer).expect("observer task present")
    }

    /// # Panics
    /// If the victim id is not in the task list; call after validation.
    pub fn victim(&self) -> &TaskSpec {
        self.task(self.victim).expect("victim task present")
    }

    /// Tasks with strictly higher priority than `task`.
    pub fn higher_priority<'a>(&'a self, task: &'a TaskSpec) -> impl Iterator<Item = &'a TaskSpec> {
        self.tasks.iter().filter(move |t| t.priority > task.priority)
    }

    pub fn utilization(&self) -> f64 {
        self.tasks.iter().map(TaskSpec::utilization).sum()
    }
}

/// A violated task-model constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateId(TaskId),
    DuplicatePeriod(Tick),
    DuplicatePriority(Priority),
    ZeroPeriod(TaskId),
    WcetOutOfRange(TaskId),
    DeadlineNotPeriod(TaskId),
    OffsetOutOfRange(TaskId),
    ZeroPriority(TaskId),
    MissingObserver(TaskId),
    MissingVictim(TaskId),
    ObserverIsVictim,
    VictimNotHigherPriority,
    VictimNotPeriodic,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId(id) => write!(f, "duplicate id {id}"),
            Violation::DuplicatePeriod(p) => write!(f, "duplicate period {p}"),
            Violation::DuplicatePriority(p) => write!(f, "duplicate priority {}", p.0),
            Violation::ZeroPeriod(id) => write!(f, "task {id}: period must be at least 1"),
            Violation::WcetOutOfRange(id) => write!(f, "task {id}: wcet outside [1, period]"),
            Violation::DeadlineNotPeriod(id) => write!(f, "task {id}: deadline differs from period"),
            Violation::OffsetOutOfRange(id) => write!(f, "task {id}: offset outside [0, period)"),
            Violation::ZeroPriority(id) => write!(f, "task {id}: priority must be positive"),
            Violation::MissingObserver(id) => write!(f, "observer {id} not in task set"),
            Violation::MissingVictim(id) => write!(f, "victim {id} not in task set"),
            Violation::ObserverIsVictim => write!(f, "observer and victim are the same task"),
            Violation::VictimNotHigherPriority => write!(f, "victim not higher priority than observer"),
            Violation::VictimNotPeriodic => write!(f, "victim not periodic"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(crate::Error::InvalidTaskSet(self.violations))
        }
    }
}

/// Check every structural invariant of a task set. Schedulability is
/// checked separately by [`crate::rta::response_time_analysis`].
pub fn validate_taskset(ts: &TaskSet) -> ValidationReport {
    let mut violations = Vec::new();

    let mut ids = HashSet::new();
    let mut periods: HashMap<Tick, usize> = HashMap::new();
    let mut priorities: HashMap<Priority, usize> = HashMap::new();
    for t in &ts.tasks {
        if !ids.insert(t.id) {
            violations.push(Violation::DuplicateId(t.id));
        }
        *periods.entry(t.period).or_default() += 1;
        *priorities.entry(t.priority).or_default() += 1;

        if t.period == 0 {
            violations.push(Violation::ZeroPeriod(t.id));
            continue;
        }
        if t.wcet == 0 || t.wcet > t.period {
            violations.push(Violation::WcetOutOfRange(t.id));
        }
        if t.deadline != t.period {
            violations.push(Violation::DeadlineNotPeriod(t.id));
        }
        if t.offset >= t.period {
            violations.push(Violation::OffsetOutOfRange(t.id));
        }
        if t.priority.0 == 0 {
            violations.push(Violation::ZeroPriority(t.id));
        }
    }

    let mut dup_periods: Vec<_> = periods.into_iter().filter(|&(_, n)| n > 1).map(|(p, _)| p).collect();
    dup_periods.sort_unstable();
    violations.extend(dup_periods.into_iter().map(Violation::DuplicatePeriod));
    let mut dup_prios: Vec<_> = priorities.into_iter().filter(|&(_, n)| n > 1).map(|(p, _)| p).collect();
    dup_prios.sort_unstable();
    violations.extend(dup_prios.into_iter().map(Violation::DuplicatePriority));

    let observer = ts.task(ts.observer);
    let victim = ts.task(ts.victim);
    if observer.is_none() {
        violations.push(Violation::MissingObserver(ts.observer));
    }
    if victim.is_none() {
        violations.push(Violation::MissingVictim(ts.victim));
    }
    if ts.observer == ts.victim {
        violations.push(Violation::ObserverIsVictim);
    }
    if let (Some(o), Some(v)) = (observer, victim) {
        if ts.observer != ts.victim && v.priority <= o.priority {
            violations.push(Violation::VictimNotHigherPriority);
        }
    }
    if let Some(v) = victim {
        if v.kind != TaskKind::Periodic {
            violations.push(Violation::VictimNotPeriodic);
        }
    }

    ValidationReport { violations }
}

/// The four-task system used as the running example throughout the docs:
/// τ1(15,1,3) at priority 1, observer (10,2,0) at 2, victim (8,2,1) at 3
/// and τ4(6,1,4) at 4.
pub fn example_taskset() -> TaskSet {
    TaskSet {
        tasks: vec![
            TaskSpec::periodic(1, 15, 1, 3, 1),
            TaskSpec::periodic(2, 10, 2, 0, 2),
            TaskSpec::periodic(3, 8, 2, 1, 3),
            TaskSpec::periodic(4, 6, 1, 4, 4),
        ],
        observer: TaskId(2),
        victim: TaskId(3),
    }
}
