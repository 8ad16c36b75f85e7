//! Fixed-priority preemptive scheduling simulator and schedule-ladder
//! inference of a periodic victim task's release times from the execution
//! intervals a lower-priority observer task can measure about itself.
//!
//! Pipeline: [`sim`] produces a ground-truth [`sim::Trace`], [`observer`]
//! reduces it to what the observer sees, [`ladder`] folds those intervals
//! modulo the victim period and infers the victim's initial offset, and
//! [`metrics`] scores the estimate. [`taskgen`] and [`experiment`] drive the
//! whole thing over synthetic task sets.

pub mod attack;
pub mod capability;
pub mod error;
pub mod experiment;
pub mod format;
pub mod ladder;
pub mod metrics;
pub mod model;
pub mod observer;
pub mod rta;
pub mod sim;
pub mod taskgen;
pub mod time;
pub mod variation;

pub use error::{Error, Result};
pub use model::{TaskId, TaskKind, TaskSet, TaskSpec};
pub use time::{Interval, Tick};
