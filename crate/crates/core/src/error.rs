use crate::model::{TaskId, Violation};
use crate::time::{Interval, Tick};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid task set: {}", join_violations(.0))]
    InvalidTaskSet(Vec<Violation>),

    #[error("task {task} missed its deadline at {deadline} (job released at {release})")]
    DeadlineMiss {
        task: TaskId,
        release: Tick,
        deadline: Tick,
    },

    #[error("observer task {0} does not appear in the trace")]
    MissingObserver(TaskId),

    #[error("period must be at least 1")]
    InvalidPeriod,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("interval {interval} starts before the ladder start {start}")]
    OutOfWindow { interval: Interval, start: Tick },

    #[error("every ladder column was eliminated; no arrival candidate remains")]
    NoCandidate,

    #[error("empty input")]
    EmptyInput,

    #[error("task set generation failed after {attempts} attempts (most frequent rejection: {constraint})")]
    GenerationFailed {
        constraint: &'static str,
        attempts: u64,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("task set file: {0}")]
    Format(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
