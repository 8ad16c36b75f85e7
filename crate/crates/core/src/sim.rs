//! Uniprocessor fixed-priority preemptive scheduling.
//!
//! At every tick the highest-priority released, unfinished job runs. The loop
//! jumps from one scheduling event (release, completion, deadline, horizon) to
//! the next instead of stepping single ticks; between two events the running
//! job cannot change, so the produced schedule is identical to a tick loop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{validate_taskset, TaskId, TaskKind, TaskSet};
use crate::time::{Interval, Tick};
use crate::variation::{sample_execution_time, sample_inter_arrival, Variation};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub task: TaskId,
    /// Per-task job sequence number, starting at 0.
    pub job: u32,
    pub span: Interval,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct JobRelease {
    pub task: TaskId,
    pub job: u32,
    pub at: Tick,
    /// Execution time this job needs.
    pub demand: Tick,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct JobCompletion {
    pub task: TaskId,
    pub job: u32,
    pub at: Tick,
}

/// Receives scheduling events in time order.
pub trait TraceSink {
    fn release(&mut self, _release: &JobRelease) {}
    fn slice(&mut self, _slice: &Slice) {}
    fn completion(&mut self, _completion: &JobCompletion) {}
}

impl<T: TraceSink + ?Sized> TraceSink for &mut T {
    fn release(&mut self, r: &JobRelease) {
        (**self).release(r)
    }
    fn slice(&mut self, s: &Slice) {
        (**self).slice(s)
    }
    fn completion(&mut self, c: &JobCompletion) {
        (**self).completion(c)
    }
}

impl<A: TraceSink, B: TraceSink> TraceSink for (A, B) {
    fn release(&mut self, r: &JobRelease) {
        self.0.release(r);
        self.1.release(r);
    }
    fn slice(&mut self, s: &Slice) {
        self.0.slice(s);
        self.1.slice(s);
    }
    fn completion(&mut self, c: &JobCompletion) {
        self.0.completion(c);
        self.1.completion(c);
    }
}

/// Ground-truth schedule over `[0, horizon)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub horizon: Tick,
    pub slices: Vec<Slice>,
    pub releases: Vec<JobRelease>,
    pub completions: Vec<JobCompletion>,
}

impl TraceSink for Trace {
    fn release(&mut self, r: &JobRelease) {
        self.releases.push(*r);
    }
    fn slice(&mut self, s: &Slice) {
        self.slices.push(*s);
    }
    fn completion(&mut self, c: &JobCompletion) {
        self.completions.push(*c);
    }
}

impl Trace {
    pub fn slices_of(&self, task: TaskId) -> impl Iterator<Item = &Slice> {
        self.slices.iter().filter(move |s| s.task == task)
    }

    pub fn releases_of(&self, task: TaskId) -> impl Iterator<Item = &JobRelease> {
        self.releases.iter().filter(move |r| r.task == task)
    }

    pub fn min_demand(&self, task: TaskId) -> Option<Tick> {
        self.releases_of(task).map(|r| r.demand).min()
    }

    /// Check the structural guarantees of a fixed-priority uniprocessor
    /// schedule: slices don't overlap, each slice sits inside its job's
    /// lifetime, completed jobs received exactly their demand, and no task
    /// runs while a higher-priority task has pending work.
    pub fn verify(&self, ts: &TaskSet) -> std::result::Result<(), String> {
        for w in self.slices.windows(2) {
            if w[1].span.start < w[0].span.end {
                return Err(format!("slices overlap: {:?} and {:?}", w[0], w[1]));
            }
        }

        // Pending windows per task, indexed by job number.
        let mut lifetimes: Vec<Vec<Interval>> = vec![Vec::new(); ts.tasks.len()];
        let mut demands: Vec<Vec<Tick>> = vec![Vec::new(); ts.tasks.len()];
        let idx = |id: TaskId| ts.index_of(id).ok_or_else(|| format!("unknown task {id}"));
        for r in &self.releases {
            let i = idx(r.task)?;
            if lifetimes[i].len() != r.job as usize {
                return Err(format!("release out of sequence: {r:?}"));
            }
            lifetimes[i].push(Interval { start: r.at, end: self.horizon });
            demands[i].push(r.demand);
        }
        for c in &self.completions {
            let life = lifetimes[idx(c.task)?]
                .get_mut(c.job as usize)
                .ok_or_else(|| format!("completion without release: {c:?}"))?;
            life.end = c.at;
        }

        let mut served: Vec<Vec<Tick>> = lifetimes.iter().map(|l| vec![0; l.len()]).collect();
        for s in &self.slices {
            let i = idx(s.task)?;
            let life = lifetimes[i]
                .get(s.job as usize)
                .ok_or_else(|| format!("slice without release: {s:?}"))?;
            if !life.covers(&s.span) {
                return Err(format!("slice {s:?} outside job lifetime {life}"));
            }
            served[i][s.job as usize] += s.span.len();

            let prio = ts.tasks[i].priority;
            for (j, t) in ts.tasks.iter().enumerate() {
                if t.priority <= prio {
                    continue;
                }
                let jobs = &lifetimes[j];
                let k = jobs.partition_point(|l| l.end <= s.span.start);
                if let Some(l) = jobs.get(k) {
                    if l.start < s.span.end && !l.is_empty() {
                        return Err(format!(
                            "task {} runs in {} while higher-priority task {} is pending in {}",
                            s.task, s.span, t.id, l
                        ));
                    }
                }
            }
        }

        for c in &self.completions {
            let i = idx(c.task)?;
            let demand = demands[i][c.job as usize];
            if served[i][c.job as usize] != demand {
                return Err(format!(
                    "job {} of task {} received {} ticks, needed {}",
                    c.job, c.task, served[i][c.job as usize], demand
                ));
            }
        }
        Ok(())
    }
}

struct ActiveJob {
    job: u32,
    release: Tick,
    deadline: Tick,
    remaining: Tick,
}

struct TaskState {
    next_release: Tick,
    next_job: u32,
    active: Option<ActiveJob>,
    rng: Option<ChaCha8Rng>,
}

/// Simulate `[0, horizon)` and collect the full trace.
pub fn simulate(ts: &TaskSet, horizon: Tick, variation: &Variation) -> Result<Trace> {
    let mut trace = Trace {
        horizon,
        ..Default::default()
    };
    simulate_into(ts, horizon, variation, &mut trace)?;
    Ok(trace)
}

/// Simulate `[0, horizon)`, streaming events into `sink`.
///
/// A job still unfinished at its deadline aborts the run with
/// [`Error::DeadlineMiss`]; jobs released before the horizon whose deadline
/// lies beyond it are simply cut off.
pub fn simulate_into<S: TraceSink>(
    ts: &TaskSet,
    horizon: Tick,
    variation: &Variation,
    sink: &mut S,
) -> Result<()> {
    simulate_with_reservation(ts, horizon, variation, None, sink)
}

/// Execution a task always spends per job regardless of sampled variation,
/// e.g. an observer's fixed measurement budget.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Reservation {
    pub task: TaskId,
    pub ticks: Tick,
}

/// [`simulate_into`] with sampled demands of `reservation.task` raised to at
/// least `reservation.ticks` (never above its WCET).
pub fn simulate_with_reservation<S: TraceSink>(
    ts: &TaskSet,
    horizon: Tick,
    variation: &Variation,
    reservation: Option<Reservation>,
    sink: &mut S,
) -> Result<()> {
    validate_taskset(ts).into_result()?;
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    if let Variation::Random(cfg) = variation {
        cfg.validate()?;
    }

    let tasks = &ts.tasks;
    let mut by_priority: Vec<usize> = (0..tasks.len()).collect();
    by_priority.sort_by_key(|&i| std::cmp::Reverse(tasks[i].priority));

    let mut states: Vec<TaskState> = tasks
        .iter()
        .enumerate()
        .map(|(i, t)| TaskState {
            next_release: t.offset,
            next_job: 0,
            active: None,
            rng: variation.seed().map(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                rng
            }),
        })
        .collect();

    // Open slice: (task index, job, start). Closed lazily so that runs of the
    // same job across unrelated events merge into one slice.
    let mut open: Option<(usize, u32, Tick)> = None;
    let close = |open: &mut Option<(usize, u32, Tick)>, end: Tick, sink: &mut S| {
        if let Some((i, job, start)) = open.take() {
            if start < end {
                sink.slice(&Slice {
                    task: tasks[i].id,
                    job,
                    span: Interval { start, end },
                });
            }
        }
    };

    let mut now: Tick = 0;
    loop {
        if now < horizon {
            for (i, t) in tasks.iter().enumerate() {
                let st = &mut states[i];
                if st.next_release != now {
                    continue;
                }
                if let Some(job) = &st.active {
                    close(&mut open, now, sink);
                    return Err(Error::DeadlineMiss {
                        task: t.id,
                        release: job.release,
                        deadline: job.deadline,
                    });
                }
                let (demand, gap) = match (variation, st.rng.as_mut()) {
                    (Variation::Random(cfg), Some(rng)) => {
                        let demand = sample_execution_time(t.wcet, cfg, rng);
                        let gap = match t.kind {
                            TaskKind::Periodic => t.period,
                            TaskKind::Sporadic => sample_inter_arrival(t.period, cfg, rng),
                        };
                        (demand, gap)
                    }
                    _ => (t.wcet, t.period),
                };
                let demand = match reservation {
                    Some(r) if r.task == t.id => demand.max(r.ticks.min(t.wcet)),
                    _ => demand,
                };
                let deadline = now.checked_add(t.deadline).ok_or(Error::Overflow("deadline"))?;
                let job = st.next_job;
                st.next_job += 1;
                st.active = Some(ActiveJob {
                    job,
                    release: now,
                    deadline,
                    remaining: demand,
                });
                st.next_release = now.checked_add(gap).ok_or(Error::Overflow("release time"))?;
                sink.release(&JobRelease {
                    task: t.id,
                    job,
                    at: now,
                    demand,
                });
            }
        }

        for (i, st) in states.iter().enumerate() {
            if let Some(job) = &st.active {
                if job.deadline <= now {
                    close(&mut open, now, sink);
                    return Err(Error::DeadlineMiss {
                        task: tasks[i].id,
                        release: job.release,
                        deadline: job.deadline,
                    });
                }
            }
        }

        if now >= horizon {
            break;
        }

        let mut next_event = horizon;
        for st in &states {
            next_event = next_event.min(st.next_release);
            if let Some(job) = &st.active {
                next_event = next_event.min(job.deadline);
            }
        }

        let running = by_priority.iter().copied().find(|&i| states[i].active.is_some());
        match running {
            None => {
                close(&mut open, now, sink);
                now = next_event;
            }
            Some(i) => {
                let job = states[i].active.as_mut().expect("selected job is active");
                match open {
                    Some((oi, oj, _)) if oi == i && oj == job.job => {}
                    _ => {
                        close(&mut open, now, sink);
                        open = Some((i, job.job, now));
                    }
                }
                let until = next_event.min(now + job.remaining);
                job.remaining -= until - now;
                now = until;
                if job.remaining == 0 {
                    let done = job.job;
                    states[i].active = None;
                    close(&mut open, now, sink);
                    sink.completion(&JobCompletion {
                        task: tasks[i].id,
                        job: done,
                        at: now,
                    });
                }
            }
        }
    }
    close(&mut open, horizon, sink);
    Ok(())
}
