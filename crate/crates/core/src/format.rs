//! Text formats: task set files (TOML), ground-truth traces, observed
//! interval lists and inference reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::InferenceResult;
use crate::model::{validate_taskset, TaskId, TaskSet, TaskSpec};
use crate::sim::{JobCompletion, JobRelease, Slice, Trace};
use crate::time::{Interval, Tick};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskSetFile {
    observer_id: TaskId,
    victim_id: TaskId,
    tasks: Vec<TaskSpec>,
}

/// Parse and validate a task set document.
pub fn read_taskset(text: &str) -> Result<TaskSet> {
    let file: TaskSetFile = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let ts = TaskSet {
        tasks: file.tasks,
        observer: file.observer_id,
        victim: file.victim_id,
    };
    validate_taskset(&ts).into_result()?;
    Ok(ts)
}

pub fn write_taskset(ts: &TaskSet) -> Result<String> {
    let file = TaskSetFile {
        observer_id: ts.observer,
        victim_id: ts.victim,
        tasks: ts.tasks.clone(),
    };
    toml::to_string(&file).map_err(|e| Error::Format(e.to_string()))
}

fn parse_fields<const N: usize>(line: &str, lineno: usize) -> Result<[u64; N]> {
    let mut out = [0u64; N];
    let mut parts = line.split(',');
    for slot in out.iter_mut() {
        let field = parts.next().ok_or_else(|| Error::Parse {
            line: lineno,
            message: format!("expected {N} fields"),
        })?;
        *slot = field.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("not a non-negative integer: {:?}", field.trim()),
        })?;
    }
    if parts.next().is_some() {
        return Err(Error::Parse {
            line: lineno,
            message: format!("expected {N} fields"),
        });
    }
    Ok(out)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// One `start,end` line per interval.
pub fn write_intervals(intervals: &[Interval]) -> String {
    let mut s = String::new();
    for iv in intervals {
        let _ = writeln!(s, "{},{}", iv.start, iv.end);
    }
    s
}

/// Parse `start,end` lines. Blank lines and `#` comments are skipped; an
/// optional `start,end` header is accepted on the first content line.
pub fn read_intervals(text: &str) -> Result<Vec<Interval>> {
    let mut out = Vec::new();
    for (n, (lineno, line)) in content_lines(text).enumerate() {
        if n == 0 && line.eq_ignore_ascii_case("start,end") {
            continue;
        }
        let [start, end] = parse_fields::<2>(line, lineno)?;
        let iv = Interval::new(start, end).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        out.push(iv);
    }
    Ok(out)
}

/// Line-oriented trace dump:
///
/// ```text
/// H,<horizon>
/// R,<task>,<job>,<at>,<demand>
/// S,<task>,<job>,<start>,<end>
/// C,<task>,<job>,<at>
/// ```
pub fn write_trace(trace: &Trace) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "H,{}", trace.horizon);
    for r in &trace.releases {
        let _ = writeln!(s, "R,{},{},{},{}", r.task.0, r.job, r.at, r.demand);
    }
    for sl in &trace.slices {
        let _ = writeln!(s, "S,{},{},{},{}", sl.task.0, sl.job, sl.span.start, sl.span.end);
    }
    for c in &trace.completions {
        let _ = writeln!(s, "C,{},{},{}", c.task.0, c.job, c.at);
    }
    s
}

fn narrow(v: u64, lineno: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Parse {
        line: lineno,
        message: format!("{v} does not fit in 32 bits"),
    })
}

pub fn read_trace(text: &str) -> Result<Trace> {
    let mut trace = Trace::default();
    let mut seen_horizon = false;
    for (lineno, line) in content_lines(text) {
        let (tag, rest) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: lineno,
            message: "missing record tag".into(),
        })?;
        match tag {
            "H" => {
                let [h] = parse_fields::<1>(rest, lineno)?;
                trace.horizon = h;
                seen_horizon = true;
            }
            "R" => {
                let [task, job, at, demand] = parse_fields::<4>(rest, lineno)?;
                trace.releases.push(JobRelease {
                    task: TaskId(narrow(task, lineno)?),
                    job: narrow(job, lineno)?,
                    at,
                    demand,
                });
            }
            "S" => {
                let [task, job, start, end] = parse_fields::<4>(rest, lineno)?;
                let span = Interval::new(start, end).map_err(|e| Error::Parse {
                    line: lineno,
                    message: e.to_string(),
                })?;
                trace.slices.push(Slice {
                    task: TaskId(narrow(task, lineno)?),
                    job: narrow(job, lineno)?,
                    span,
                });
            }
            "C" => {
                let [task, job, at] = parse_fields::<3>(rest, lineno)?;
                trace.completions.push(JobCompletion {
                    task: TaskId(narrow(task, lineno)?),
                    job: narrow(job, lineno)?,
                    at,
                });
            }
            other => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("unknown record tag {other:?}"),
                })
            }
        }
    }
    if !seen_horizon {
        return Err(Error::Parse {
            line: 0,
            message: "missing H (horizon) record".into(),
        });
    }
    Ok(trace)
}

/// `key=value` lines describing an inference.
pub fn write_inference(res: &InferenceResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "period={}", res.period);
    let _ = writeln!(s, "ladder_start={}", res.ladder_start);
    let _ = writeln!(s, "survivors={}", res.survivors);
    let runs: Vec<String> = res.candidates.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(s, "candidates={}", runs.join(" "));
    match res.estimate {
        Some(e) => {
            let _ = writeln!(s, "arrival_column={}", e.column);
            let _ = writeln!(s, "initial_offset={}", e.offset);
            let _ = writeln!(s, "run_len={}", e.run_len);
        }
        None => {
            let _ = writeln!(s, "arrival_column=none");
            let _ = writeln!(s, "initial_offset=none");
        }
    }
    s
}

/// Offline inference over an interval list: fold into a ladder of
/// `period` columns starting at `start` and pick the arrival column.
pub fn infer_from_intervals(intervals: &[Interval], period: Tick, start: Tick) -> Result<InferenceResult> {
    let mut ladder = crate::ladder::Ladder::new(period, start)?;
    ladder.mark_intervals(intervals)?;
    Ok(crate::ladder::infer_arrival_column(&ladder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::example_taskset;
    use crate::sim::simulate;
    use crate::variation::{Variation, VariationConfig};

    #[test]
    fn taskset_round_trip() {
        let ts = example_taskset();
        let text = write_taskset(&ts).unwrap();
        assert!(text.contains("observer_id = 2"));
        assert_eq!(read_taskset(&text).unwrap(), ts);
    }

    #[test]
    fn taskset_rejects_unknown_and_invalid() {
        let text = write_taskset(&example_taskset()).unwrap();
        assert!(matches!(read_taskset(&format!("bogus = 1\n{text}")), Err(Error::Format(_))));
        let bad = text.replace("victim_id = 3", "victim_id = 1");
        assert!(matches!(read_taskset(&bad), Err(Error::InvalidTaskSet(_))));
    }

    #[test]
    fn intervals_parse() {
        let ivs = read_intervals("start,end\n0,1\n\n# note\n12, 13\n").unwrap();
        assert_eq!(ivs, vec![Interval::new(0, 1).unwrap(), Interval::new(12, 13).unwrap()]);
        assert_eq!(read_intervals(&write_intervals(&ivs)).unwrap(), ivs);
    }

    #[test]
    fn interval_errors_carry_line_numbers() {
        match read_intervals("0,1\n5,x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match read_intervals("0,1\n\n7,3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_intervals("1,2,3"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn trace_round_trip_is_exact() {
        let ts = example_taskset();
        let trace = simulate(&ts, 400, &Variation::Random(VariationConfig::with_seed(9))).unwrap();
        let text = write_trace(&trace);
        let back = read_trace(&text).unwrap();
        assert_eq!(back, trace);
        assert_eq!(write_trace(&back), text);
    }

    #[test]
    fn trace_parse_errors() {
        assert!(matches!(read_trace("R,1,0,0,1\n"), Err(Error::Parse { .. })));
        assert!(matches!(read_trace("H,10\nQ,1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn example_report() {
        let ivs = read_intervals("0,1\n12,13\n20,21\n30,31\n43,44\n").unwrap();
        let res = infer_from_intervals(&ivs, 8, 0).unwrap();
        let text = write_inference(&res);
        assert!(text.contains("candidates=[1,3) [5,6) [7,8)"));
        assert!(text.contains("initial_offset=1"));
    }
}
