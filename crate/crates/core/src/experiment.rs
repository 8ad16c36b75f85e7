//! Monte Carlo experiment harness: generate task sets per cell, attack each
//! one, aggregate per cell and pooled, and render CSV/JSON outputs.
//!
//! Every run draws from its own seed derived from the experiment seed, the
//! cell index and the run index, so results do not depend on how runs are
//! spread across threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::attack::run_attack_sweep;
use crate::capability::coverage_ratio;
use crate::error::{Error, Result};
use crate::metrics::{aggregate, RunOutcome};
use crate::model::TaskSet;
use crate::taskgen::{generate_taskset, group_bounds, CoverageConstraint, GenConfig, VictimMode, TASK_COUNTS};
use crate::time::Tick;
use crate::variation::{Variation, VariationConfig};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Success and precision against attack duration.
    DurationSweep,
    /// Task count by utilization group.
    TasksUtilGrid,
    /// Victim directly above the observer against victim at the top.
    VictimPriority,
    /// Share of sporadic tasks.
    SporadicMix,
    /// Coverage ratio groups, with coverage below 1 allowed.
    CoverageGroups,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::DurationSweep,
        ExperimentKind::TasksUtilGrid,
        ExperimentKind::VictimPriority,
        ExperimentKind::SporadicMix,
        ExperimentKind::CoverageGroups,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::DurationSweep => "duration-sweep",
            ExperimentKind::TasksUtilGrid => "tasks-util-grid",
            ExperimentKind::VictimPriority => "victim-priority",
            ExperimentKind::SporadicMix => "sporadic-mix",
            ExperimentKind::CoverageGroups => "coverage-groups",
        }
    }

    /// Durations (in LCM multiples) used when none are given.
    pub fn default_multiples(&self) -> Vec<u64> {
        match self {
            ExperimentKind::DurationSweep => (1..=10).collect(),
            _ => vec![10],
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub tasksets_per_cell: usize,
    pub duration_multiples: Vec<u64>,
    pub seed: u64,
    /// Restrict to these cell labels; all cells when `None`.
    pub cells: Option<Vec<String>>,
    /// Override the per-task-set measurement budget.
    pub lambda: Option<Tick>,
    /// Run every job at its WCET with strictly periodic sporadic tasks.
    pub deterministic: bool,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, tasksets_per_cell: usize, seed: u64) -> Self {
        ExperimentSpec {
            kind,
            tasksets_per_cell,
            duration_multiples: kind.default_multiples(),
            seed,
            cells: None,
            lambda: None,
            deterministic: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasksets_per_cell == 0 {
            return Err(Error::InvalidParameter("tasksets_per_cell must be at least 1".into()));
        }
        if self.duration_multiples.is_empty() || self.duration_multiples.contains(&0) {
            return Err(Error::InvalidParameter("duration multiples must be non-empty and positive".into()));
        }
        Ok(())
    }
}

/// How task sets for one cell are drawn.
#[derive(Clone, Debug, PartialEq)]
enum Draw {
    /// Cycle through every (utilization group, task count, victim mode)
    /// combination, one per run.
    Mixed { sporadic_fraction: f64 },
    /// Utilization group cycles with the run index, task count and victim
    /// mode fixed.
    AcrossUtil { n_tasks: usize, victim_mode: VictimMode },
    /// Victim mode alternates with the run index.
    AlternatingVictim { util_group: u8, n_tasks: usize },
    /// Random combination per attempt batch until one meets the coverage
    /// range.
    CoverageRange(f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub label: String,
    /// Plot series and x value this cell contributes to.
    pub series: String,
    pub x: f64,
    draw: Draw,
}

const COMBOS: usize = 10 * TASK_COUNTS.len() * 2;
const MIXED_ATTEMPTS: u64 = 200_000;
const COVERAGE_BATCHES: u64 = 500;
const COVERAGE_BATCH_ATTEMPTS: u64 = 2_000;

fn combo(j: usize) -> (u8, usize, VictimMode) {
    let j = j % COMBOS;
    let mode = if j / 60 == 0 {
        VictimMode::Highest
    } else {
        VictimMode::JustAboveObserver
    };
    ((j % 10) as u8, TASK_COUNTS[(j / 10) % TASK_COUNTS.len()], mode)
}

fn gen_config(util_group: u8, n_tasks: usize, victim_mode: VictimMode, sporadic_fraction: f64) -> GenConfig {
    GenConfig {
        util_group,
        n_tasks,
        sporadic_fraction,
        victim_mode,
        coverage: CoverageConstraint::Full,
        max_attempts: MIXED_ATTEMPTS,
        ..GenConfig::default()
    }
}

pub fn cells(kind: ExperimentKind) -> Vec<Cell> {
    let cell = |label: String, series: String, x: f64, draw: Draw| Cell { label, series, x, draw };
    match kind {
        ExperimentKind::DurationSweep => vec![cell(
            "mixed".into(),
            "mixed".into(),
            0.0,
            Draw::Mixed { sporadic_fraction: 0.5 },
        )],
        ExperimentKind::TasksUtilGrid => TASK_COUNTS
            .iter()
            .flat_map(|&n| {
                (0..10u8).map(move |x| {
                    cell(
                        format!("n{n}-u{x}"),
                        format!("n{n}"),
                        x as f64,
                        Draw::AlternatingVictim { util_group: x, n_tasks: n },
                    )
                })
            })
            .collect(),
        ExperimentKind::VictimPriority => [VictimMode::JustAboveObserver, VictimMode::Highest]
            .iter()
            .flat_map(|&mode| {
                TASK_COUNTS.iter().map(move |&n| {
                    cell(
                        format!("{}-n{n}", mode.label()),
                        mode.label().into(),
                        n as f64,
                        Draw::AcrossUtil {
                            n_tasks: n,
                            victim_mode: mode,
                        },
                    )
                })
            })
            .collect(),
        ExperimentKind::SporadicMix => [0u32, 25, 50, 75, 100]
            .iter()
            .map(|&pct| {
                cell(
                    format!("sporadic-{pct}"),
                    "sporadic".into(),
                    pct as f64,
                    Draw::Mixed {
                        sporadic_fraction: pct as f64 / 100.0,
                    },
                )
            })
            .collect(),
        ExperimentKind::CoverageGroups => (0..10u8)
            .map(|x| {
                let (lo, hi) = group_bounds(x);
                cell(format!("cov-{x}"), "coverage".into(), x as f64, Draw::CoverageRange(lo, hi))
            })
            .collect(),
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run `index` of cell `cell`.
pub fn run_seed(seed: u64, cell: usize, index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(((cell as u64) << 32) | index as u64))
}

/// Draw the task set for one run, returning the configuration that
/// produced it.
fn draw_taskset(draw: &Draw, index: usize, rng: &mut ChaCha8Rng) -> Result<(GenConfig, TaskSet)> {
    let fixed = |cfg: GenConfig, rng: &mut ChaCha8Rng| generate_taskset(&cfg, rng).map(|ts| (cfg, ts));
    match *draw {
        Draw::Mixed { sporadic_fraction } => {
            let (x, n, mode) = combo(index);
            fixed(gen_config(x, n, mode, sporadic_fraction), rng)
        }
        Draw::AcrossUtil { n_tasks, victim_mode } => {
            fixed(gen_config((index % 10) as u8, n_tasks, victim_mode, 0.5), rng)
        }
        Draw::AlternatingVictim { util_group, n_tasks } => {
            let mode = if index.is_multiple_of(2) {
                VictimMode::Highest
            } else {
                VictimMode::JustAboveObserver
            };
            fixed(gen_config(util_group, n_tasks, mode, 0.5), rng)
        }
        Draw::CoverageRange(lo, hi) => {
            let mut last = None;
            for _ in 0..COVERAGE_BATCHES {
                let (x, n, mode) = combo(rng.random_range(0..COMBOS));
                let cfg = GenConfig {
                    coverage: CoverageConstraint::Range(lo, hi),
                    max_attempts: COVERAGE_BATCH_ATTEMPTS,
                    ..gen_config(x, n, mode, 0.5)
                };
                match generate_taskset(&cfg, rng) {
                    Ok(ts) => return Ok((cfg, ts)),
                    Err(Error::GenerationFailed { constraint, .. }) => last = Some(constraint),
                    Err(e) => return Err(e),
                }
            }
            Err(Error::GenerationFailed {
                constraint: last.unwrap_or("coverage ratio"),
                attempts: COVERAGE_BATCHES * COVERAGE_BATCH_ATTEMPTS,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DurationResult {
    pub multiple: u64,
    pub inferred_offset: Option<Tick>,
    pub success: bool,
    pub precision: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunDetail {
    pub util_group: u8,
    pub n_tasks: usize,
    pub victim_mode: VictimMode,
    pub sporadic_fraction: f64,
    pub observer_period: Tick,
    pub victim_period: Tick,
    pub observer_wcet: Tick,
    pub coverage: f64,
    pub utilization: f64,
    pub lambda: Tick,
    pub true_offset: Tick,
    pub durations: Vec<DurationResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub cell: usize,
    pub index: usize,
    pub seed: u64,
    pub outcome: std::result::Result<RunDetail, String>,
}

fn run_one(spec: &ExperimentSpec, cell: &Cell, cell_idx: usize, index: usize) -> RunRecord {
    let seed = run_seed(spec.seed, cell_idx, index);
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (cfg, ts) = draw_taskset(&cell.draw, index, &mut rng)?;
        let variation = if spec.deterministic {
            Variation::Deterministic
        } else {
            Variation::Random(VariationConfig::with_seed(splitmix64(seed ^ 0x5851_F42D_4C95_7F2D)))
        };
        let reports = run_attack_sweep(&ts, &spec.duration_multiples, spec.lambda, None, &variation)?;
        let (o, v) = (ts.observer(), ts.victim());
        Ok::<_, Error>(RunDetail {
            util_group: cfg.util_group,
            n_tasks: cfg.n_tasks,
            victim_mode: cfg.victim_mode,
            sporadic_fraction: cfg.sporadic_fraction,
            observer_period: o.period,
            victim_period: v.period,
            observer_wcet: o.wcet,
            coverage: coverage_ratio(o.wcet, o.period, v.period).ratio(),
            utilization: ts.utilization(),
            lambda: reports[0].lambda,
            true_offset: v.offset,
            durations: spec
                .duration_multiples
                .iter()
                .zip(&reports)
                .map(|(&multiple, r)| DurationResult {
                    multiple,
                    inferred_offset: r.inferred_offset(),
                    success: r.outcome.success,
                    precision: r.outcome.precision,
                })
                .collect(),
        })
    })();
    RunRecord {
        cell: cell_idx,
        index,
        seed,
        outcome: outcome.map_err(|e| e.to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub group: String,
    pub multiple: u64,
    pub success_rate: f64,
    pub precision_mean: f64,
    pub precision_sd: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotPoint {
    pub series: String,
    pub x: f64,
    pub success_rate: f64,
    pub precision_mean: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub cells: Vec<Cell>,
    pub runs: Vec<RunRecord>,
    /// Per-cell rows followed by pooled rows.
    pub summary: Vec<SummaryRow>,
    pub plot: Vec<PlotPoint>,
}

fn selected_cells(spec: &ExperimentSpec) -> Result<Vec<(usize, Cell)>> {
    let all: Vec<(usize, Cell)> = cells(spec.kind).into_iter().enumerate().collect();
    match &spec.cells {
        None => Ok(all),
        Some(wanted) => {
            for w in wanted {
                if !all.iter().any(|(_, c)| &c.label == w) {
                    let known: Vec<&str> = all.iter().map(|(_, c)| c.label.as_str()).collect();
                    return Err(Error::InvalidParameter(format!(
                        "unknown cell {w:?} for {}; known: {}",
                        spec.kind.name(),
                        known.join(",")
                    )));
                }
            }
            Ok(all.into_iter().filter(|(_, c)| wanted.contains(&c.label)).collect())
        }
    }
}

/// Pooled groups a run contributes to besides its own cell.
fn pooled_groups(kind: ExperimentKind, d: &RunDetail) -> Vec<String> {
    let mut g = vec!["all".to_string()];
    match kind {
        ExperimentKind::TasksUtilGrid => {
            g.push(format!("n{}", d.n_tasks));
            g.push(format!("u{}", d.util_group));
        }
        ExperimentKind::VictimPriority => {
            g.push(d.victim_mode.label().to_string());
            g.push(format!("{}-u{}", d.victim_mode.label(), d.util_group));
        }
        _ => {}
    }
    g
}

fn summarize(group: String, multiple: u64, outcomes: &[RunOutcome]) -> Option<SummaryRow> {
    let s = aggregate(outcomes).ok()?;
    Some(SummaryRow {
        group,
        multiple,
        success_rate: s.success_rate,
        precision_mean: s.precision_mean,
        precision_sd: s.precision_sd,
        n: s.n,
    })
}

fn outcome_of(d: &RunDetail, k: usize) -> RunOutcome {
    let r = &d.durations[k];
    RunOutcome {
        success: r.success,
        precision: r.precision,
        epsilon: 0,
        duration_units: r.multiple as f64,
    }
}

/// Run an experiment on `threads` worker threads (rayon's default when
/// `None`). The result does not depend on the thread count.
pub fn run_experiment(spec: &ExperimentSpec, threads: Option<usize>) -> Result<ExperimentResult> {
    spec.validate()?;
    let chosen = selected_cells(spec)?;
    let jobs: Vec<(usize, usize)> = chosen
        .iter()
        .enumerate()
        .flat_map(|(pos, _)| (0..spec.tasksets_per_cell).map(move |i| (pos, i)))
        .collect();
    let work = || -> Vec<RunRecord> {
        jobs.par_iter()
            .map(|&(pos, i)| {
                let (cell_idx, cell) = &chosen[pos];
                run_one(spec, cell, *cell_idx, i)
            })
            .collect()
    };
    let runs = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(work),
        None => work(),
    };

    let mut summary = Vec::new();
    let mut plot = Vec::new();
    let last = spec.duration_multiples.len() - 1;
    for (pos, (_, cell)) in chosen.iter().enumerate() {
        let details: Vec<&RunDetail> = runs[pos * spec.tasksets_per_cell..(pos + 1) * spec.tasksets_per_cell]
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok())
            .collect();
        for (k, &m) in spec.duration_multiples.iter().enumerate() {
            let outcomes: Vec<RunOutcome> = details.iter().map(|d| outcome_of(d, k)).collect();
            let row = summarize(cell.label.clone(), m, &outcomes);
            if let Some(row) = &row {
                let x = if spec.kind == ExperimentKind::DurationSweep { m as f64 } else { cell.x };
                if spec.kind == ExperimentKind::DurationSweep || k == last {
                    plot.push(PlotPoint {
                        series: cell.series.clone(),
                        x,
                        success_rate: row.success_rate,
                        precision_mean: row.precision_mean,
                        n: row.n,
                    });
                }
            }
            summary.extend(row);
        }
    }

    let mut pooled: BTreeMap<String, Vec<&RunDetail>> = BTreeMap::new();
    for d in runs.iter().filter_map(|r| r.outcome.as_ref().ok()) {
        for g in pooled_groups(spec.kind, d) {
            pooled.entry(g).or_default().push(d);
        }
    }
    let mut pooled_rows = Vec::new();
    for (group, details) in &pooled {
        for (k, &m) in spec.duration_multiples.iter().enumerate() {
            let outcomes: Vec<RunOutcome> = details.iter().map(|d| outcome_of(d, k)).collect();
            pooled_rows.extend(summarize(format!("pooled:{group}"), m, &outcomes));
        }
    }
    // "all" first, then the remaining groups in name order
    pooled_rows.sort_by_key(|r| r.group != "pooled:all");
    summary.extend(pooled_rows);

    Ok(ExperimentResult {
        spec: spec.clone(),
        cells: chosen.into_iter().map(|(_, c)| c).collect(),
        runs,
        summary,
        plot,
    })
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ExperimentResult {
    fn group_label(&self, row: &SummaryRow) -> String {
        if self.spec.duration_multiples.len() == 1 {
            row.group.clone()
        } else {
            format!("{}@{}xLCM", row.group, row.multiple)
        }
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("experiment,group,success_rate,precision_mean,precision_sd,n\n");
        for row in &self.summary {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                self.spec.kind.name(),
                csv_field(&self.group_label(row)),
                f6(row.success_rate),
                f6(row.precision_mean),
                f6(row.precision_sd),
                row.n
            );
        }
        s
    }

    pub fn runs_csv(&self) -> String {
        let mut s = String::from(
            "experiment,cell,index,seed,util_group,n_tasks,victim,sporadic_fraction,observer_period,\
             victim_period,observer_wcet,coverage,utilization,lambda,multiple,true_offset,\
             inferred_offset,success,precision,error\n",
        );
        let kind = self.spec.kind.name();
        for r in &self.runs {
            let label = cells(self.spec.kind)[r.cell].label.clone();
            match &r.outcome {
                Ok(d) => {
                    for dr in &d.durations {
                        let _ = writeln!(
                            s,
                            "{kind},{label},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},",
                            r.index,
                            r.seed,
                            d.util_group,
                            d.n_tasks,
                            d.victim_mode.label(),
                            f6(d.sporadic_fraction),
                            d.observer_period,
                            d.victim_period,
                            d.observer_wcet,
                            f6(d.coverage),
                            f6(d.utilization),
                            d.lambda,
                            dr.multiple,
                            d.true_offset,
                            dr.inferred_offset.map_or(String::new(), |a| a.to_string()),
                            dr.success,
                            f6(dr.precision),
                        );
                    }
                }
                Err(e) => {
                    let _ = writeln!(s, "{kind},{label},{},{},,,,,,,,,,,,,,,,{}", r.index, r.seed, csv_field(e));
                }
            }
        }
        s
    }

    pub fn plot_csv(&self) -> String {
        let mut s = String::from("series,x,success_rate,precision_mean,n\n");
        for p in &self.plot {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                csv_field(&p.series),
                p.x,
                f6(p.success_rate),
                f6(p.precision_mean),
                p.n
            );
        }
        s
    }

    pub fn manifest_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct RunEntry<'a> {
            cell: &'a str,
            index: usize,
            seed: u64,
            error: Option<&'a str>,
        }
        #[derive(Serialize)]
        struct Manifest<'a> {
            tool: &'static str,
            version: &'static str,
            spec: &'a ExperimentSpec,
            cells: Vec<&'a str>,
            failed_runs: usize,
            runs: Vec<RunEntry<'a>>,
        }
        let all = cells(self.spec.kind);
        let labels: Vec<&str> = self.cells.iter().map(|c| c.label.as_str()).collect();
        let runs = self
            .runs
            .iter()
            .map(|r| RunEntry {
                cell: all[r.cell].label.as_str(),
                index: r.index,
                seed: r.seed,
                error: r.outcome.as_ref().err().map(String::as_str),
            })
            .collect();
        let m = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            spec: &self.spec,
            cells: labels,
            failed_runs: self.runs.iter().filter(|r| r.outcome.is_err()).count(),
            runs,
        };
        serde_json::to_string_pretty(&m).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn plot_file_name(&self) -> String {
        format!("plot_{}.csv", self.spec.kind.name().replace('-', "_"))
    }

    /// Write `summary.csv`, `runs.csv`, the plot file and `manifest.json`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("summary.csv"), self.summary_csv())?;
        std::fs::write(dir.join("runs.csv"), self.runs_csv())?;
        std::fs::write(dir.join(self.plot_file_name()), self.plot_csv())?;
        std::fs::write(dir.join("manifest.json"), self.manifest_json()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn cell_counts() {
        assert_eq!(cells(ExperimentKind::DurationSweep).len(), 1);
        assert_eq!(cells(ExperimentKind::TasksUtilGrid).len(), 60);
        assert_eq!(cells(ExperimentKind::VictimPriority).len(), 12);
        assert_eq!(cells(ExperimentKind::SporadicMix).len(), 5);
        assert_eq!(cells(ExperimentKind::CoverageGroups).len(), 10);
    }

    #[test]
    fn combos_cover_every_cell_once() {
        let mut seen: Vec<_> = (0..COMBOS).map(combo).collect();
        seen.sort_by_key(|&(x, n, m)| (x, n, m.label()));
        seen.dedup();
        assert_eq!(seen.len(), COMBOS);
    }

    #[test]
    fn seeds_are_distinct() {
        let mut s: Vec<u64> = (0..4).flat_map(|c| (0..100).map(move |i| run_seed(7, c, i))).collect();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 400);
    }

    #[test]
    fn small_sweep_is_reproducible() {
        let mut spec = ExperimentSpec::new(ExperimentKind::DurationSweep, 4, 11);
        spec.duration_multiples = vec![1, 2];
        let a = run_experiment(&spec, Some(1)).unwrap();
        let b = run_experiment(&spec, Some(2)).unwrap();
        assert_eq!(a.summary_csv(), b.summary_csv());
        assert_eq!(a.runs_csv(), b.runs_csv());
        assert!(a.summary_csv().starts_with("experiment,group,success_rate,precision_mean,precision_sd,n\n"));
        assert!(a.summary_csv().contains("duration-sweep,mixed@2xLCM,"));
    }

    #[test]
    fn unknown_cell_is_rejected() {
        let mut spec = ExperimentSpec::new(ExperimentKind::SporadicMix, 1, 0);
        spec.cells = Some(vec!["sporadic-33".into()]);
        assert!(matches!(run_experiment(&spec, None), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn zero_tasksets_is_rejected() {
        let spec = ExperimentSpec::new(ExperimentKind::SporadicMix, 0, 0);
        assert!(spec.validate().is_err());
    }
}
