//! Projected gradient descent baselines.
//!
//! Both take a plain gradient step and then project onto one support's
//! `C`-ball. Random PGD draws that support at random each iteration; best
//! PGD tries every feasible support and keeps the projection with the
//! lowest objective.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{GscoError, Result};
use crate::linalg;
use crate::model::{project_to_support_ball, ConstraintModel};
use crate::objective::LeastSquaresObjective;
use crate::rng::{stream_rng, STREAM_PGD};
use crate::solver::{SolveOutput, DEFAULT_REL_TOL};
use crate::support::SupportSet;
use crate::trace::{IterationRecord, Termination, TraceBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PgdStep {
    Fixed { alpha: f64 },
    InverseL { lipschitz: f64 },
}

impl PgdStep {
    fn alpha(&self) -> Result<f64> {
        let a = match *self {
            PgdStep::Fixed { alpha } => alpha,
            PgdStep::InverseL { lipschitz } if lipschitz > 0.0 => 1.0 / lipschitz,
            PgdStep::InverseL { lipschitz } => {
                return Err(GscoError::Config(format!(
                    "Lipschitz constant must be positive, got {lipschitz}"
                )))
            }
        };
        if a > 0.0 && a.is_finite() {
            Ok(a)
        } else {
            Err(GscoError::Config(format!("step size must be positive, got {a}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgdConfig {
    pub step: PgdStep,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub seed: u64,
    #[serde(default)]
    pub record_iterates: bool,
    #[serde(default = "default_true")]
    pub record_wall_clock: bool,
}

fn default_true() -> bool {
    true
}

impl PgdConfig {
    pub fn new(step: PgdStep) -> Self {
        PgdConfig {
            step,
            max_iters: 1000,
            rel_tol: DEFAULT_REL_TOL,
            seed: 0,
            record_iterates: false,
            record_wall_clock: true,
        }
    }
}

/// Projection of `w` with the lowest objective among `supports`; ties keep
/// the earliest support.
pub fn best_projection(
    objective: &LeastSquaresObjective,
    supports: &[SupportSet],
    w: &[f64],
    radius: f64,
) -> Result<(usize, Vec<f64>, f64)> {
    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    for (k, s) in supports.iter().enumerate() {
        let p = project_to_support_ball(w, s, radius);
        let f = objective.evaluate(&p)?;
        if best.as_ref().is_none_or(|(_, _, b)| f < *b) {
            best = Some((k, p, f));
        }
    }
    best.ok_or_else(|| GscoError::Config("no feasible supports to project onto".into()))
}

pub fn random_pgd(
    objective: &LeastSquaresObjective,
    model: &ConstraintModel,
    config: &PgdConfig,
    x0: Option<&[f64]>,
) -> Result<SolveOutput> {
    let mut rng = stream_rng(config.seed, STREAM_PGD);
    let radius = model.radius();
    run_pgd(objective, model, config, x0, |w| {
        let s = model.random_support(&mut rng);
        let p = project_to_support_ball(w, &s, radius);
        Ok((s, p))
    })
}

pub fn best_pgd(
    objective: &LeastSquaresObjective,
    model: &ConstraintModel,
    config: &PgdConfig,
    x0: Option<&[f64]>,
) -> Result<SolveOutput> {
    let supports: Vec<SupportSet> = model.enumerate_supports()?.collect();
    let radius = model.radius();
    run_pgd(objective, model, config, x0, |w| {
        let (k, p, _) = best_projection(objective, &supports, w, radius)?;
        Ok((supports[k].clone(), p))
    })
}

fn run_pgd<P>(
    objective: &LeastSquaresObjective,
    model: &ConstraintModel,
    config: &PgdConfig,
    x0: Option<&[f64]>,
    mut project: P,
) -> Result<SolveOutput>
where
    P: FnMut(&[f64]) -> Result<(SupportSet, Vec<f64>)>,
{
    let alpha = config.step.alpha()?;
    if config.max_iters == 0 {
        return Err(GscoError::Config("max_iters must be at least 1".into()));
    }
    let d = objective.dim();
    if model.dim() != d {
        return Err(GscoError::Dimension { expected: d, got: model.dim() });
    }
    let mut x = match x0 {
        Some(x0) if x0.len() != d => {
            return Err(GscoError::Dimension { expected: d, got: x0.len() })
        }
        Some(x0) => x0.to_vec(),
        None => vec![0.0; d],
    };
    let clock = Instant::now();
    let wall = || if config.record_wall_clock { clock.elapsed().as_nanos() as u64 } else { 0 };
    let check = |v: f64, iter: usize| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GscoError::Numeric { iter, msg: format!("objective evaluated to {v}") })
        }
    };

    let mut builder = TraceBuilder::new();
    let mut fx = check(objective.evaluate(&x)?, 0)?;
    let mut best = (x.clone(), fx);
    let mut termination = Termination::MaxIters;
    let mut t = 0;
    while t < config.max_iters {
        if fx == 0.0 {
            termination = Termination::Converged;
            break;
        }
        let grad = objective.gradient(&x)?;
        let w: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - alpha * gi).collect();
        let (support, x_next) = project(&w)?;
        let f_next = check(objective.evaluate(&x_next)?, t + 1)?;
        let keep = config.record_iterates;
        builder.push(IterationRecord {
            t,
            eta: Some(alpha),
            objective: fx,
            captured_norm: Some(support.restricted_norm(&w)),
            support_size: Some(support.len()),
            shrinks: 0,
            wall_ns: wall(),
            floored: false,
            iterate_norm: linalg::norm(&x),
            iterate: keep.then(|| x.clone()),
            target: None,
            support: keep.then_some(support),
        });
        let converged = ((f_next - fx) / fx).abs() <= config.rel_tol;
        x = x_next;
        fx = f_next;
        t += 1;
        if fx < best.1 {
            best = (x.clone(), fx);
        }
        if converged {
            termination = Termination::Converged;
            break;
        }
    }
    let mut last = IterationRecord::terminal(t, fx, linalg::norm(&x), wall());
    if config.record_iterates {
        last.iterate = Some(x.clone());
    }
    builder.push(last);
    Ok(SolveOutput {
        x_best: best.0,
        f_best: best.1,
        trace: builder.finish(termination),
    })
}
