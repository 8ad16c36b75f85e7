#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schedscope::attack::{observe, run_attack, AttackConfig, Duration};
use schedscope::capability::{attack_window, choose_lambda, coverage_ratio};
use schedscope::model::Priority;
use schedscope::rta::is_schedulable;
use schedscope::sim::{simulate, Trace};
use schedscope::taskgen::{generate_taskset, CoverageConstraint, GenConfig, VictimMode, TASK_COUNTS};
use schedscope::time::{gcd, hyperperiod, lcm};
use schedscope::variation::{Variation, VariationConfig};
use schedscope::{Error, TaskId, TaskKind, TaskSet, TaskSpec, Tick};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator settings drawn at random, any coverage.
pub fn random_gen_config(rng: &mut ChaCha8Rng) -> GenConfig {
    GenConfig {
        util_group: rng.random_range(0..10),
        n_tasks: TASK_COUNTS[rng.random_range(0..TASK_COUNTS.len())],
        sporadic_fraction: [0.0, 0.5, 1.0][rng.random_range(0..3)],
        victim_mode: if rng.random_bool(0.5) {
            VictimMode::Highest
        } else {
            VictimMode::JustAboveObserver
        },
        coverage: CoverageConstraint::Any,
        max_attempts: 100_000,
        ..GenConfig::default()
    }
}

pub fn random_taskset(seed: u64) -> TaskSet {
    let mut r = rng(seed);
    let cfg = random_gen_config(&mut r);
    generate_taskset(&cfg, &mut r).expect("generation")
}

/// Tick-by-tick reference scheduler driven by the releases (and sampled
/// demands) recorded in `trace`. Returns who ran at every tick.
pub fn naive_schedule(ts: &TaskSet, trace: &Trace) -> Vec<Option<(TaskId, u32)>> {
    let prio = |id: TaskId| ts.task(id).unwrap().priority;
    let mut releases = trace.releases.clone();
    releases.sort_by_key(|r| r.at);
    let mut next = 0;
    // (priority, task, job, remaining)
    let mut pending: Vec<(Priority, TaskId, u32, Tick)> = Vec::new();
    let mut out = Vec::with_capacity(trace.horizon as usize);
    for now in 0..trace.horizon {
        while next < releases.len() && releases[next].at == now {
            let r = &releases[next];
            pending.push((prio(r.task), r.task, r.job, r.demand));
            next += 1;
        }
        pending.retain(|p| p.3 > 0);
        let top = pending.iter_mut().max_by_key(|p| p.0);
        match top {
            Some(p) => {
                p.3 -= 1;
                out.push(Some((p.1, p.2)));
            }
            None => out.push(None),
        }
    }
    out
}

pub fn expand(trace: &Trace) -> Vec<Option<(TaskId, u32)>> {
    let mut out = vec![None; trace.horizon as usize];
    for s in &trace.slices {
        for x in s.span.start..s.span.end {
            assert!(out[x as usize].is_none(), "overlap at {x}");
            out[x as usize] = Some((s.task, s.job));
        }
    }
    out
}

/// Small random periodic task set with synchronous release and arbitrary
/// distinct priorities; the observer is the lowest, the victim the highest.
pub fn random_synchronous_taskset(seed: u64) -> TaskSet {
    const PERIODS: [Tick; 14] = [4, 5, 6, 8, 10, 12, 15, 16, 20, 24, 30, 40, 48, 60];
    let mut r = rng(seed);
    let n = r.random_range(2..=6);
    let mut periods = PERIODS.to_vec();
    periods.shuffle(&mut r);
    periods.truncate(n);
    let target: f64 = r.random_range(0.6..1.15);
    let mut prios: Vec<u32> = (1..=n as u32).collect();
    prios.shuffle(&mut r);
    let tasks: Vec<TaskSpec> = periods
        .iter()
        .zip(&prios)
        .enumerate()
        .map(|(i, (&p, &pr))| {
            let share = target / n as f64 * r.random_range(0.5..1.5);
            let e = ((share * p as f64).round() as Tick).clamp(1, p);
            TaskSpec::periodic(i as u32 + 1, p, e, 0, pr)
        })
        .collect();
    let lowest = tasks.iter().min_by_key(|t| t.priority).unwrap().id;
    let highest = tasks.iter().max_by_key(|t| t.priority).unwrap().id;
    TaskSet {
        tasks,
        observer: lowest,
        victim: highest,
    }
}

/// Simulate one hyperperiod from a synchronous release. Returns whether every
/// deadline was met.
pub fn simulated_schedulable(ts: &TaskSet) -> bool {
    let h = hyperperiod(ts.tasks.iter().map(|t| t.period)).unwrap();
    match simulate(ts, h, &Variation::Deterministic) {
        Ok(_) => true,
        Err(Error::DeadlineMiss { .. }) => false,
        Err(e) => panic!("unexpected error {e}"),
    }
}

/// First observer release at or after `a_v`.
pub fn steady_start(a_o: Tick, p_o: Tick, a_v: Tick) -> Tick {
    if a_o >= a_v {
        a_o
    } else {
        a_o + (a_v - a_o).div_ceil(p_o) * p_o
    }
}

/// Ladder column holding every victim release.
pub fn true_column(ts: &TaskSet, start: Tick) -> Tick {
    let v = ts.victim();
    (v.offset % v.period + v.period - start % v.period) % v.period
}

/// One randomized run: observed ticks falling into the columns
/// `[δ_v, δ_v + bcet_v)`. Returns (ticks checked, offending ticks).
pub fn blind_column_run(seed: u64) -> (u64, Vec<Tick>) {
    let ts = random_taskset(seed);
    let (o, v) = (ts.observer(), ts.victim());
    let start = steady_start(o.offset, o.period, v.offset);
    let end = start + attack_window(o.period, v.period, 2).unwrap();
    let lambda = choose_lambda(o.wcet, o.period, v.period);
    let var = Variation::Random(VariationConfig::with_seed(seed ^ 0xA5A5));
    let obs = observe(&ts, start, end, lambda, &var).unwrap();
    let bcet = obs.victim_min_demand.expect("victim released in window");
    let p = v.period;
    let delta = true_column(&ts, start);
    let mut checked = 0;
    let mut bad = Vec::new();
    for iv in &obs.intervals {
        for x in iv.start..iv.end {
            checked += 1;
            let col = (x - start) % p;
            if (col + p - delta) % p < bcet {
                bad.push(x);
            }
        }
    }
    (checked, bad)
}

#[derive(Debug)]
pub struct FullCoverageCase {
    pub p_o: Tick,
    pub p_v: Tick,
    pub e_o: Tick,
    pub e_v: Tick,
    pub a_o: Tick,
    pub a_v: Tick,
}

impl FullCoverageCase {
    /// Ladder start once the victim is already running.
    pub fn start(&self) -> Tick {
        steady_start(self.a_o, self.p_o, self.a_v)
    }

    pub fn taskset(&self) -> TaskSet {
        TaskSet {
            tasks: vec![
                TaskSpec::periodic(1, self.p_o, self.e_o, self.a_o, 1),
                TaskSpec::periodic(2, self.p_v, self.e_v, self.a_v, 2),
            ],
            observer: TaskId(1),
            victim: TaskId(2),
        }
    }
}

/// Random schedulable observer+victim pair with full coverage.
pub fn full_coverage_case(seed: u64) -> FullCoverageCase {
    let mut r = rng(seed);
    loop {
        let p_o = r.random_range(2..=80);
        let p_v = r.random_range(2..=80);
        if p_o == p_v {
            continue;
        }
        let g = gcd(p_o, p_v);
        if g > p_o {
            continue;
        }
        let e_o = r.random_range(g..=p_o);
        let e_v = r.random_range(1..=p_v);
        let case = FullCoverageCase {
            p_o,
            p_v,
            e_o,
            e_v,
            a_o: r.random_range(0..p_o),
            a_v: r.random_range(0..p_v),
        };
        if is_schedulable(&case.taskset()) {
            return case;
        }
    }
}

/// Survivors equal the victim's execution columns and the offset is
/// recovered. Returns a description of the first mismatch.
pub fn full_coverage_check(case: &FullCoverageCase) -> Result<(), String> {
    let ts = case.taskset();
    let cov = coverage_ratio(case.e_o, case.p_o, case.p_v);
    assert!(cov.is_full());
    let duration = cov.ceil() * lcm(case.p_o, case.p_v).unwrap();
    let cfg = AttackConfig {
        start: Some(case.start()),
        duration: Duration::Ticks(duration),
        lambda: None,
        variation: Variation::Deterministic,
    };
    let report = run_attack(&ts, &cfg).map_err(|e| e.to_string())?;
    let delta = true_column(&ts, case.start());
    let expected: BTreeSet<Tick> = (0..case.e_v).map(|j| (delta + j) % case.p_v).collect();
    let survivors: BTreeSet<Tick> = report
        .inference
        .candidates
        .iter()
        .flat_map(|c| (0..c.len).map(move |j| (c.start + j) % c.period))
        .collect();
    if survivors != expected {
        return Err(format!("{case:?}: survivors {survivors:?}, expected {expected:?}"));
    }
    if !report.outcome.success {
        return Err(format!("{case:?}: inferred {:?}", report.inferred_offset()));
    }
    Ok(())
}

pub fn is_periodic(t: &TaskSpec) -> bool {
    t.kind == TaskKind::Periodic
}
