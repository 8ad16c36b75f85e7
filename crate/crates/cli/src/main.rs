use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schedscope::attack::{evaluate_windows, observe};
use schedscope::capability::{analyze_capability, attack_window, choose_lambda};
use schedscope::experiment::{run_experiment, run_seed, ExperimentKind, ExperimentSpec};
use schedscope::format::{
    infer_from_intervals, read_intervals, read_taskset, write_inference, write_intervals, write_taskset, write_trace,
};
use schedscope::rta::response_time_analysis;
use schedscope::sim::simulate;
use schedscope::taskgen::{generate_taskset, CoverageConstraint, GenConfig, VictimMode};
use schedscope::variation::{Variation, VariationConfig};
use schedscope::{Error, Result, TaskSet, Tick};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "schedscope", version, about = "Fixed-priority schedule simulation and victim arrival inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random task sets into a directory.
    Generate(GenerateArgs),
    /// Simulate a task set and print the ground-truth trace.
    Simulate(SimulateArgs),
    /// Run the full attack on a task set and score it.
    Attack(AttackArgs),
    /// Coverage, recommended budget, window and response times.
    Analyze(AnalyzeArgs),
    /// Run one of the experiment sweeps.
    Sweep(SweepArgs),
    /// Infer the victim offset from a file of `start,end` intervals.
    Infer(InferArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Every job runs for its WCET and sporadic tasks arrive periodically.
    #[arg(long)]
    deterministic: bool,
}

impl RunArgs {
    fn variation(&self) -> Variation {
        if self.deterministic {
            Variation::Deterministic
        } else {
            Variation::Random(VariationConfig::with_seed(self.seed))
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Utilization group x, total in [0.001+0.1x, 0.1+0.1x].
    #[arg(long, default_value_t = 4)]
    util_group: u8,
    #[arg(long, default_value_t = 5)]
    tasks: usize,
    #[arg(long, default_value_t = 0.5)]
    sporadic_fraction: f64,
    /// `high` (victim at the top) or `low` (directly above the observer).
    #[arg(long, default_value = "high")]
    victim: String,
    /// `full`, `any`, or `LO:HI`.
    #[arg(long, default_value = "full")]
    coverage: String,
}

#[derive(Args)]
struct SimulateArgs {
    taskset: PathBuf,
    #[arg(long)]
    horizon: Tick,
    #[command(flatten)]
    run: RunArgs,
    /// Write the trace here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    taskset: PathBuf,
    /// Attack duration in multiples of lcm(p_o, p_v).
    #[arg(long, default_value = "10")]
    duration_multiples: String,
    /// Attack duration in ticks; overrides --duration-multiples.
    #[arg(long)]
    ticks: Option<Tick>,
    /// Ladder start; defaults to the observer's first release.
    #[arg(long)]
    start: Option<Tick>,
    #[arg(long)]
    lambda: Option<Tick>,
    #[command(flatten)]
    run: RunArgs,
    /// Also write the observed intervals (`start,end` lines) to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    taskset: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// duration-sweep, tasks-util-grid, victim-priority, sporadic-mix or coverage-groups.
    experiment: String,
    #[arg(long, default_value_t = 100)]
    tasksets_per_cell: usize,
    /// Comma-separated list, ranges allowed: `1-10` or `1,5,10`.
    #[arg(long)]
    duration_multiples: Option<String>,
    /// Comma-separated cell labels to run.
    #[arg(long)]
    cells: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    lambda: Option<Tick>,
    #[arg(long)]
    deterministic: bool,
    /// Worker threads; all available cores by default.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    intervals: PathBuf,
    #[arg(long)]
    period: Tick,
    #[arg(long, default_value_t = 0)]
    start: Tick,
}

fn parse_multiples(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidParameter(format!("bad duration multiples {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

fn parse_coverage(s: &str) -> Result<CoverageConstraint> {
    match s {
        "full" => Ok(CoverageConstraint::Full),
        "any" => Ok(CoverageConstraint::Any),
        _ => {
            let bad = || Error::InvalidParameter(format!("bad coverage {s:?}; use full, any or LO:HI"));
            let (a, b) = s.split_once(':').ok_or_else(bad)?;
            Ok(CoverageConstraint::Range(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
            ))
        }
    }
}

fn load_taskset(path: &Path) -> Result<TaskSet> {
    read_taskset(&fs::read_to_string(path)?)
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let victim_mode = match args.victim.as_str() {
        "high" => VictimMode::Highest,
        "low" => VictimMode::JustAboveObserver,
        other => return Err(Error::InvalidParameter(format!("bad victim mode {other:?}; use high or low"))),
    };
    let cfg = GenConfig {
        util_group: args.util_group,
        n_tasks: args.tasks,
        sporadic_fraction: args.sporadic_fraction,
        victim_mode,
        coverage: parse_coverage(&args.coverage)?,
        ..GenConfig::default()
    };
    cfg.validate()?;

    #[derive(Serialize)]
    struct Entry {
        file: String,
        seed: u64,
        utilization: f64,
        coverage: f64,
    }
    #[derive(Serialize)]
    struct Manifest<'a> {
        seed: u64,
        config: &'a GenConfig,
        tasksets: Vec<Entry>,
    }

    fs::create_dir_all(&args.out)?;
    let mut entries = Vec::with_capacity(args.count);
    for i in 0..args.count {
        let seed = run_seed(args.seed, 0, i);
        let ts = generate_taskset(&cfg, &mut ChaCha8Rng::seed_from_u64(seed))?;
        let file = format!("taskset-{:04}.toml", i + 1);
        fs::write(args.out.join(&file), write_taskset(&ts)?)?;
        let (o, v) = (ts.observer(), ts.victim());
        entries.push(Entry {
            file,
            seed,
            utilization: ts.utilization(),
            coverage: schedscope::capability::coverage_ratio(o.wcet, o.period, v.period).ratio(),
        });
    }
    let manifest = Manifest {
        seed: args.seed,
        config: &cfg,
        tasksets: entries,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(args.out.join("manifest.json"), json)?;
    println!("wrote {} task sets to {}", args.count, args.out.display());
    Ok(())
}

fn simulate_cmd(args: &SimulateArgs) -> Result<()> {
    let ts = load_taskset(&args.taskset)?;
    let trace = simulate(&ts, args.horizon, &args.run.variation())?;
    let text = write_trace(&trace);
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn attack(args: &AttackArgs) -> Result<()> {
    let ts = load_taskset(&args.taskset)?;
    let (o, v) = (ts.observer(), ts.victim());
    let start = args.start.unwrap_or(o.offset);
    let ends: Vec<Tick> = match args.ticks {
        Some(d) => vec![start.checked_add(d).ok_or(Error::Overflow("attack window"))?],
        None => parse_multiples(&args.duration_multiples)?
            .into_iter()
            .map(|k| {
                attack_window(o.period, v.period, k)?
                    .checked_add(start)
                    .ok_or(Error::Overflow("attack window"))
            })
            .collect::<Result<_>>()?,
    };
    let end = *ends.iter().max().expect("non-empty");
    let lambda = args.lambda.unwrap_or_else(|| choose_lambda(o.wcet, o.period, v.period));
    let obs = observe(&ts, start, end, lambda, &args.run.variation())?;
    if let Some(path) = &args.out {
        fs::write(path, write_intervals(&obs.intervals))?;
    }
    let reports = evaluate_windows(&ts, &obs, &ends)?;
    let mut s = String::new();
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "victim_period={}", v.period);
        let _ = writeln!(s, "lambda={}", r.lambda);
        let _ = writeln!(s, "start={}", r.start);
        let _ = writeln!(s, "duration={}", r.duration);
        let _ = writeln!(s, "lcm={}", r.lcm);
        let _ = writeln!(s, "intervals={}", r.intervals_observed);
        s.push_str(&write_inference(&r.inference));
        let _ = writeln!(
            s,
            "inferred_offset={}",
            r.inferred_offset().map_or("none".to_string(), |a| a.to_string())
        );
        let _ = writeln!(s, "true_offset={}", r.true_offset);
        let _ = writeln!(s, "success={}", r.outcome.success);
        let _ = writeln!(s, "precision={:.6}", r.outcome.precision);
    }
    print!("{s}");
    Ok(())
}

fn analyze(args: &AnalyzeArgs) -> Result<()> {
    let ts = load_taskset(&args.taskset)?;
    let (o, v) = (ts.observer(), ts.victim());
    let cap = analyze_capability(o.wcet, o.period, v.period)?;
    println!("observer={} period={} wcet={}", o.id, o.period, o.wcet);
    println!("victim={} period={}", v.id, v.period);
    println!("utilization={:.6}", ts.utilization());
    println!("coverage={} ({:.6})", cap.coverage, cap.coverage.ratio());
    println!("full_coverage={}", cap.full_coverage);
    println!("recommended_lambda={}", cap.recommended_lambda);
    println!("lcm={}", cap.window);
    let rta = response_time_analysis(&ts);
    println!("schedulable={}", rta.schedulable);
    for rt in &rta.response_times {
        println!(
            "response_time[{}]={}",
            rt.task,
            rt.bound.map_or("unbounded".to_string(), |b| b.to_string())
        );
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let kind: ExperimentKind = args.experiment.parse()?;
    let mut spec = ExperimentSpec::new(kind, args.tasksets_per_cell, args.seed);
    if let Some(m) = &args.duration_multiples {
        spec.duration_multiples = parse_multiples(m)?;
    }
    spec.cells = args
        .cells
        .as_ref()
        .map(|c| c.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect());
    spec.lambda = args.lambda;
    spec.deterministic = args.deterministic;
    let res = run_experiment(&spec, args.threads)?;
    res.write_to(&args.out)?;
    let failed = res.runs.iter().filter(|r| r.outcome.is_err()).count();
    print!("{}", res.summary_csv());
    eprintln!("{} runs ({failed} failed) written to {}", res.runs.len(), args.out.display());
    Ok(())
}

fn infer(args: &InferArgs) -> Result<()> {
    let intervals = read_intervals(&fs::read_to_string(&args.intervals)?)?;
    let res = infer_from_intervals(&intervals, args.period, args.start)?;
    print!("{}", write_inference(&res));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Attack(a) => attack(a),
        Command::Analyze(a) => analyze(a),
        Command::Sweep(a) => sweep(a),
        Command::Infer(a) => infer(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiples() {
        assert_eq!(parse_multiples("1-3,5").unwrap(), vec![1, 2, 3, 5]);
        assert_eq!(parse_multiples("10").unwrap(), vec![10]);
        assert!(parse_multiples("0").is_err());
        assert!(parse_multiples("3-1").is_err());
        assert!(parse_multiples("x").is_err());
    }

    #[test]
    fn coverage_flags() {
        assert_eq!(parse_coverage("full").unwrap(), CoverageConstraint::Full);
        assert_eq!(parse_coverage("0.4:0.5").unwrap(), CoverageConstraint::Range(0.4, 0.5));
        assert!(parse_coverage("half").is_err());
    }
}
