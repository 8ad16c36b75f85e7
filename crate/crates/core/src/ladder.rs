//! Schedule ladder: the observer's timeline folded modulo the victim period.
//!
//! Global tick `x` lands in column `(x - start) mod period`. Every victim job
//! is released in the same column, and no observer execution can ever appear
//! in the columns the victim occupies right after its release. Columns touched
//! by observed intervals are eliminated; the longest surviving circular run of
//! columns is taken as the arrival column estimate.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::time::{Interval, Tick};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ladder {
    period: Tick,
    start: Tick,
    eliminated: Vec<bool>,
    eliminated_count: usize,
}

impl Ladder {
    pub fn new(period: Tick, start: Tick) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidPeriod);
        }
        let width = usize::try_from(period).map_err(|_| Error::Overflow("ladder width"))?;
        Ok(Ladder {
            period,
            start,
            eliminated: vec![false; width],
            eliminated_count: 0,
        })
    }

    pub fn period(&self) -> Tick {
        self.period
    }

    pub fn start(&self) -> Tick {
        self.start
    }

    /// Column of global tick `x`, which must not precede the ladder start.
    pub fn column(&self, x: Tick) -> Tick {
        (x - self.start) % self.period
    }

    pub fn is_eliminated(&self, column: Tick) -> bool {
        self.eliminated[column as usize]
    }

    pub fn survivors(&self) -> impl Iterator<Item = Tick> + '_ {
        (0..self.period).filter(|&c| !self.eliminated[c as usize])
    }

    pub fn survivor_count(&self) -> usize {
        self.eliminated.len() - self.eliminated_count
    }

    fn eliminate(&mut self, column: usize) {
        if !self.eliminated[column] {
            self.eliminated[column] = true;
            self.eliminated_count += 1;
        }
    }

    pub fn mark(&mut self, interval: &Interval) -> Result<()> {
        if interval.start < self.start {
            return Err(Error::OutOfWindow {
                interval: *interval,
                start: self.start,
            });
        }
        if interval.len() >= self.period {
            for c in 0..self.eliminated.len() {
                self.eliminate(c);
            }
            return Ok(());
        }
        let first = self.column(interval.start) as usize;
        let width = self.eliminated.len();
        for k in 0..interval.len() as usize {
            self.eliminate((first + k) % width);
        }
        Ok(())
    }

    /// Eliminate every column covered by `intervals`. Nothing is marked if any
    /// interval starts before the ladder.
    pub fn mark_intervals(&mut self, intervals: &[Interval]) -> Result<()> {
        if let Some(bad) = intervals.iter().find(|iv| iv.start < self.start) {
            return Err(Error::OutOfWindow {
                interval: *bad,
                start: self.start,
            });
        }
        intervals.iter().try_for_each(|iv| self.mark(iv))
    }

    /// Maximal circular runs of surviving columns, ordered by start column.
    pub fn candidates(&self) -> Vec<ColumnRun> {
        let width = self.eliminated.len();
        if self.eliminated_count == 0 {
            return vec![ColumnRun {
                start: 0,
                len: self.period,
                period: self.period,
            }];
        }
        if self.eliminated_count == width {
            return Vec::new();
        }
        // Scan once around the circle starting just after an eliminated
        // column so that no run is split at the wrap point.
        let anchor = self.eliminated.iter().position(|&e| e).expect("some column eliminated");
        let mut runs = Vec::new();
        let mut current: Option<(usize, usize)> = None;
        for k in 1..=width {
            let c = (anchor + k) % width;
            if self.eliminated[c] {
                if let Some((s, n)) = current.take() {
                    runs.push((s, n));
                }
            } else {
                match &mut current {
                    Some((_, n)) => *n += 1,
                    None => current = Some((c, 1)),
                }
            }
        }
        let mut runs: Vec<ColumnRun> = runs
            .into_iter()
            .map(|(s, n)| ColumnRun {
                start: s as Tick,
                len: n as Tick,
                period: self.period,
            })
            .collect();
        runs.sort_by_key(|r| r.start);
        runs
    }
}

/// Run of consecutive columns `start, start+1, …` (mod period).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnRun {
    pub start: Tick,
    pub len: Tick,
    #[serde(skip)]
    pub period: Tick,
}

impl ColumnRun {
    pub fn contains(&self, column: Tick) -> bool {
        (column + self.period - self.start) % self.period < self.len
    }

    pub fn end(&self) -> Tick {
        let end = self.start + self.len;
        if end > self.period {
            end - self.period
        } else {
            end
        }
    }
}

impl fmt::Display for ColumnRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InferenceResult {
    pub period: Tick,
    pub ladder_start: Tick,
    pub candidates: Vec<ColumnRun>,
    pub survivors: usize,
    /// `None` when every column was eliminated.
    pub estimate: Option<Estimate>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Estimate {
    /// Inferred arrival column.
    pub column: Tick,
    /// Inferred initial offset, `(start + column) mod period`.
    pub offset: Tick,
    /// Length of the chosen candidate run.
    pub run_len: Tick,
}

impl InferenceResult {
    pub fn largest_len(&self) -> Tick {
        self.estimate.map_or(0, |e| e.run_len)
    }

    pub fn arrival_column(&self) -> Result<Tick> {
        self.estimate.map(|e| e.column).ok_or(Error::NoCandidate)
    }

    pub fn initial_offset(&self) -> Result<Tick> {
        self.estimate.map(|e| e.offset).ok_or(Error::NoCandidate)
    }
}

/// Pick the longest surviving run (smallest start column on ties) and take
/// its first column as the arrival column.
pub fn infer_arrival_column(ladder: &Ladder) -> InferenceResult {
    let candidates = ladder.candidates();
    let best = candidates
        .iter()
        .copied()
        .reduce(|best, r| if r.len > best.len { r } else { best });
    let estimate = best.map(|r| Estimate {
        column: r.start,
        offset: initial_offset(ladder.start(), r.start, ladder.period()),
        run_len: r.len,
    });
    InferenceResult {
        period: ladder.period(),
        ladder_start: ladder.start(),
        survivors: ladder.survivor_count(),
        candidates,
        estimate,
    }
}

/// `(start + column) mod period`, without overflowing for large `start`.
pub fn initial_offset(start: Tick, column: Tick, period: Tick) -> Tick {
    (start % period + column % period) % period
}

/// Offset recovered from an inference outcome.
pub fn infer_initial_offset(res: &InferenceResult) -> Result<Tick> {
    res.initial_offset()
}

/// Release time of the victim's `n`-th job given its offset.
pub fn predict_arrival(offset: Tick, period: Tick, n: u64) -> Result<Tick> {
    if period == 0 {
        return Err(Error::InvalidPeriod);
    }
    if offset >= period {
        return Err(Error::InvalidParameter(format!(
            "offset {offset} not below period {period}"
        )));
    }
    period
        .checked_mul(n)
        .and_then(|x| x.checked_add(offset))
        .ok_or(Error::Overflow("predicted arrival"))
}
