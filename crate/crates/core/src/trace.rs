//! Per-iteration records emitted by the solvers, and their CSV/JSON forms.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::support::SupportSet;

/// Column header of the trace CSV.
pub const TRACE_CSV_HEADER: &str = "t,eta,objective,captured_norm,support_size,shrinks,wall_ns";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxIters,
    Converged,
    Stationary,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::MaxIters => "max_iters",
            Termination::Converged => "converged",
            Termination::Stationary => "stationary",
        })
    }
}

/// State at iterate `t` and the step taken from it.
///
/// The final record of a run describes the last iterate and carries no step
/// (`eta`, `captured_norm` and `support_size` are `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    pub eta: Option<f64>,
    /// `f(x_t)`.
    pub objective: f64,
    pub captured_norm: Option<f64>,
    pub support_size: Option<usize>,
    pub shrinks: usize,
    pub wall_ns: u64,
    /// Backtracking hit its floor without satisfying the sufficient-decrease test.
    pub floored: bool,
    /// `‖x_t‖₂`.
    pub iterate_norm: f64,
    /// `x_t`, when iterates are recorded.
    pub iterate: Option<Vec<f64>>,
    /// Point stepped toward (`ṽ` or `ṽ/δ`), when iterates are recorded.
    pub target: Option<Vec<f64>>,
    /// Support chosen at this step, when iterates are recorded.
    pub support: Option<SupportSet>,
}

impl IterationRecord {
    pub(crate) fn terminal(t: usize, objective: f64, iterate_norm: f64, wall_ns: u64) -> Self {
        IterationRecord {
            t,
            eta: None,
            objective,
            captured_norm: None,
            support_size: None,
            shrinks: 0,
            wall_ns,
            floored: false,
            iterate_norm,
            iterate: None,
            target: None,
            support: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub best_t: usize,
    pub best_objective: f64,
    pub termination: Termination,
}

impl IterationTrace {
    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.objective)
    }

    pub fn floored_steps(&self) -> usize {
        self.records.iter().filter(|r| r.floored).count()
    }

    pub fn max_iterate_norm(&self) -> f64 {
        self.records.iter().map(|r| r.iterate_norm).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.t,
                opt(r.eta),
                r.objective,
                opt(r.captured_norm),
                opt(r.support_size),
                r.shrinks,
                r.wall_ns
            );
        }
        out
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            best_t: self.best_t,
            best_objective: self.best_objective,
            termination: self.termination,
            iterations: self.iterations(),
            floored_steps: self.floored_steps(),
            max_iterate_norm: self.max_iterate_norm(),
        }
    }
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub best_t: usize,
    pub best_objective: f64,
    pub termination: Termination,
    pub iterations: usize,
    pub floored_steps: usize,
    pub max_iterate_norm: f64,
}

/// Builds a trace, tracking the first minimizer of the objective.
pub(crate) struct TraceBuilder {
    records: Vec<IterationRecord>,
    best: Option<(usize, f64)>,
}

impl TraceBuilder {
    pub(crate) fn new() -> Self {
        TraceBuilder {
            records: Vec::new(),
            best: None,
        }
    }

    pub(crate) fn push(&mut self, record: IterationRecord) {
        if self.best.is_none_or(|(_, b)| record.objective < b) {
            self.best = Some((record.t, record.objective));
        }
        self.records.push(record);
    }

    pub(crate) fn finish(self, termination: Termination) -> IterationTrace {
        let (best_t, best_objective) = self.best.unwrap_or((0, f64::NAN));
        IterationTrace {
            records: self.records,
            best_t,
            best_objective,
            termination,
        }
    }
}
