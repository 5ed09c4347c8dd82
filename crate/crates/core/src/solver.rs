//! Frank-Wolfe-type outer loop driven by a dual maximization oracle.
//!
//! Each iteration forms a dual vector `z_t` (negative gradient for DMO-FW,
//! a gradient step pulled toward the origin for DMO-AccFW), asks the oracle
//! for a support, scales `z_t` on that support to radius `C`, and moves
//! toward it. The best iterate seen is returned.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dmo::{support_to_direction, DmoSelection, Oracle};
use crate::error::{GscoError, Result};
use crate::linalg;
use crate::model::ConstraintModel;
use crate::objective::LeastSquaresObjective;
use crate::trace::{IterationRecord, IterationTrace, Termination, TraceBuilder};

/// Smallest step backtracking will try before giving up.
pub const BACKTRACK_FLOOR: f64 = 1e-12;

/// Default relative-change stopping tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FwVariant {
    Fw,
    AccFw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpdateOption {
    I,
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `η_t = 2/(t+2)`.
    OpenLoop,
    /// Sufficient-decrease backtracking, warm-started from the last accepted step.
    Backtracking { beta: f64, eta_init: f64 },
    /// `η_t = min{⟨−∇f, ṽ−x⟩ / (L‖ṽ−x‖²), 1}`.
    DemyanovRubinov { lipschitz: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub variant: FwVariant,
    pub option: UpdateOption,
    pub step_rule: StepRule,
    /// Oracle approximation factor; scales the target under Option II.
    pub delta: f64,
    /// Smoothness constant for the AccFW dual vector.
    pub lipschitz: Option<f64>,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub dmo: DmoSelection,
    /// Keep `x_t`, the step target and the support in every record.
    #[serde(default)]
    pub record_iterates: bool,
    /// Fill `wall_ns`; when false it is written as 0 so traces are byte-stable.
    #[serde(default = "default_true")]
    pub record_wall_clock: bool,
}

fn default_true() -> bool {
    true
}

impl SolverConfig {
    /// DMO-FW, Option I, open-loop steps.
    pub fn new(dmo: DmoSelection) -> Self {
        SolverConfig {
            variant: FwVariant::Fw,
            option: UpdateOption::I,
            step_rule: StepRule::OpenLoop,
            delta: 1.0,
            lipschitz: None,
            max_iters: 1000,
            rel_tol: DEFAULT_REL_TOL,
            dmo,
            record_iterates: false,
            record_wall_clock: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(GscoError::Config(format!("delta must be in (0,1], got {}", self.delta)));
        }
        if self.max_iters == 0 {
            return Err(GscoError::Config("max_iters must be at least 1".into()));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(GscoError::Config(format!("rel_tol must be >= 0, got {}", self.rel_tol)));
        }
        match self.step_rule {
            StepRule::OpenLoop => {}
            StepRule::Backtracking { beta, eta_init } => {
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(GscoError::Config(format!("beta must be in (0,1), got {beta}")));
                }
                if !(eta_init > 0.0 && eta_init <= 1.0) {
                    return Err(GscoError::Config(format!(
                        "initial step must be in (0,1], got {eta_init}"
                    )));
                }
                if self.variant == FwVariant::AccFw {
                    return Err(GscoError::Config(
                        "AccFW cannot use backtracking: its dual vector depends on the step being searched"
                            .into(),
                    ));
                }
            }
            StepRule::DemyanovRubinov { lipschitz } => check_lipschitz(Some(lipschitz))?,
        }
        if self.variant == FwVariant::AccFw {
            check_lipschitz(self.lipschitz)?;
        }
        Ok(())
    }
}

fn check_lipschitz(l: Option<f64>) -> Result<()> {
    match l {
        Some(l) if l > 0.0 && l.is_finite() => Ok(()),
        other => Err(GscoError::Config(format!(
            "a positive Lipschitz constant is required, got {other:?}"
        ))),
    }
}

/// Dual vector for one iteration.
pub fn compute_z(
    variant: FwVariant,
    x: &[f64],
    grad: &[f64],
    lipschitz: f64,
    eta: f64,
) -> Result<Vec<f64>> {
    match variant {
        FwVariant::Fw => Ok(grad.iter().map(|g| -g).collect()),
        FwVariant::AccFw => {
            if !(eta > 0.0) || !(lipschitz > 0.0) {
                return Err(GscoError::Config(format!(
                    "AccFW needs L > 0 and eta > 0, got L={lipschitz}, eta={eta}"
                )));
            }
            let scale = lipschitz * eta;
            Ok(x.iter().zip(grad).map(|(xi, gi)| -(xi - gi / scale)).collect())
        }
    }
}

/// `x + η(ṽ − x)` (Option I) or `x + η(ṽ/δ − x)` (Option II).
pub fn step(x: &[f64], v: &[f64], eta: f64, option: UpdateOption, delta: f64) -> Vec<f64> {
    match option {
        UpdateOption::I => x.iter().zip(v).map(|(xi, vi)| xi + eta * (vi - xi)).collect(),
        UpdateOption::II => x
            .iter()
            .zip(v)
            .map(|(xi, vi)| xi + eta * (vi / delta - xi))
            .collect(),
    }
}

fn step_target(v: &[f64], option: UpdateOption, delta: f64) -> Vec<f64> {
    match option {
        UpdateOption::I => v.to_vec(),
        UpdateOption::II => v.iter().map(|vi| vi / delta).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Backtrack {
    pub eta: f64,
    pub shrinks: usize,
    /// No step down to [`BACKTRACK_FLOOR`] satisfied the test; `eta` is the floor.
    pub floored: bool,
}

/// Shrinks `eta_prev` by `beta` until
/// `f(x − η(x − v)) ≤ f(x) − ½η‖x − v‖²`.
pub fn backtracking_eta<F>(f: F, x: &[f64], v: &[f64], eta_prev: f64, beta: f64) -> Result<Backtrack>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if !(eta_prev > 0.0 && eta_prev <= 1.0) || !(beta > 0.0 && beta < 1.0) {
        return Err(GscoError::Config(format!(
            "backtracking needs eta in (0,1] and beta in (0,1), got {eta_prev}, {beta}"
        )));
    }
    let fx = finite(f(x)?)?;
    let diff = linalg::sub(x, v);
    let dist_sq = linalg::norm_sq(&diff);
    let mut eta = eta_prev;
    let mut shrinks = 0;
    loop {
        let probe: Vec<f64> = x.iter().zip(&diff).map(|(xi, di)| xi - eta * di).collect();
        let lhs = finite(f(&probe)?)?;
        if lhs <= fx - 0.5 * eta * dist_sq {
            return Ok(Backtrack { eta, shrinks, floored: false });
        }
        let next = eta * beta;
        if next < BACKTRACK_FLOOR {
            return Ok(Backtrack {
                eta: BACKTRACK_FLOOR,
                shrinks,
                floored: true,
            });
        }
        eta = next;
        shrinks += 1;
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(GscoError::Numeric {
            iter: 0,
            msg: format!("objective evaluated to {v}"),
        })
    }
}

/// Demyanov-Rubinov step, clamped to `[0, 1]`; zero when `v = x`.
pub fn demyanov_rubinov_eta(grad: &[f64], v: &[f64], x: &[f64], lipschitz: f64) -> f64 {
    let d = linalg::sub(v, x);
    let dist_sq = linalg::norm_sq(&d);
    if dist_sq == 0.0 {
        return 0.0;
    }
    let num: f64 = grad.iter().zip(&d).map(|(g, di)| -g * di).sum();
    (num / (lipschitz * dist_sq)).clamp(0.0, 1.0)
}

/// `2/(t+2)`.
pub fn open_loop_eta(t: usize) -> f64 {
    2.0 / (t as f64 + 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutput {
    pub x_best: Vec<f64>,
    pub f_best: f64,
    pub trace: IterationTrace,
}

/// Runs the FW-type method from `x0` (the origin when `None`).
///
/// Stops after `max_iters` steps, when `|f(x_{t+1}) − f(x_t)| / |f(x_t)|`
/// drops to `rel_tol` (immediately if `f(x_t) = 0`), or when the oracle's
/// support captures none of `z_t`.
pub fn solve(
    config: &SolverConfig,
    objective: &LeastSquaresObjective,
    model: &ConstraintModel,
    x0: Option<&[f64]>,
) -> Result<SolveOutput> {
    config.validate()?;
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
    let radius = model.radius();
    let mut oracle = Oracle::new(model, config.dmo)?;
    let clock = Instant::now();
    let wall = |on: bool| if on { clock.elapsed().as_nanos() as u64 } else { 0 };
    let numeric = |iter: usize, e: GscoError| match e {
        GscoError::Numeric { msg, .. } => GscoError::Numeric { iter, msg },
        other => other,
    };

    let mut builder = TraceBuilder::new();
    let mut fx = finite(objective.evaluate(&x)?).map_err(|e| numeric(0, e))?;
    let mut best = (x.clone(), fx);
    let mut eta_warm = match config.step_rule {
        StepRule::Backtracking { eta_init, .. } => eta_init,
        _ => 1.0,
    };
    let mut termination = Termination::MaxIters;
    let mut t = 0;
    while t < config.max_iters {
        if fx == 0.0 {
            termination = Termination::Converged;
            break;
        }
        let grad = objective.gradient(&x)?;
        let scheduled = open_loop_eta(t);
        let z = compute_z(
            config.variant,
            &x,
            &grad,
            config.lipschitz.unwrap_or(f64::NAN),
            scheduled,
        )?;
        let choice = oracle.select(&z)?;
        if choice.captured_norm == 0.0 {
            termination = Termination::Stationary;
            break;
        }
        let v = support_to_direction(&z, &choice.support, radius)?;
        let target = step_target(&v, config.option, config.delta);
        let (eta, shrinks, floored) = match config.step_rule {
            StepRule::OpenLoop => (scheduled, 0, false),
            StepRule::Backtracking { beta, .. } => {
                let bt = backtracking_eta(|p| objective.evaluate(p), &x, &target, eta_warm, beta)
                    .map_err(|e| numeric(t, e))?;
                eta_warm = bt.eta;
                (bt.eta, bt.shrinks, bt.floored)
            }
            StepRule::DemyanovRubinov { lipschitz } => {
                (demyanov_rubinov_eta(&grad, &target, &x, lipschitz), 0, false)
            }
        };
        let x_next = step(&x, &v, eta, config.option, config.delta);
        let f_next = finite(objective.evaluate(&x_next)?).map_err(|e| numeric(t + 1, e))?;

        let keep = config.record_iterates;
        builder.push(IterationRecord {
            t,
            eta: Some(eta),
            objective: fx,
            captured_norm: Some(choice.captured_norm),
            support_size: Some(choice.support.len()),
            shrinks,
            wall_ns: wall(config.record_wall_clock),
            floored,
            iterate_norm: linalg::norm(&x),
            iterate: keep.then(|| x.clone()),
            target: keep.then_some(target),
            support: keep.then_some(choice.support),
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
    let mut last = IterationRecord::terminal(t, fx, linalg::norm(&x), wall(config.record_wall_clock));
    if config.record_iterates {
        last.iterate = Some(x.clone());
    }
    builder.push(last);
    let trace = builder.finish(termination);
    Ok(SolveOutput {
        x_best: best.0,
        f_best: best.1,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmo::DmoVariant;
    use crate::linalg::Matrix;
    use crate::objective::{generate_instance, InstanceSpec};

    fn quad_1d(x: &[f64]) -> Result<f64> {
        Ok(0.5 * x[0] * x[0])
    }

    #[test]
    fn compute_z_examples() {
        assert_eq!(compute_z(FwVariant::Fw, &[0.0, 0.0], &[1.0, -2.0], 1.0, 1.0).unwrap(), vec![-1.0, 2.0]);
        assert_eq!(compute_z(FwVariant::AccFw, &[0.0, 0.0], &[1.0, -2.0], 1.0, 1.0).unwrap(), vec![1.0, -2.0]);
        assert_eq!(compute_z(FwVariant::AccFw, &[0.5, -1.0], &[0.0, 0.0], 3.0, 0.5).unwrap(), vec![-0.5, 1.0]);
        assert!(compute_z(FwVariant::AccFw, &[0.0], &[1.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn step_examples() {
        let x = [0.3, -0.2, 0.0];
        let v = [1.0, 0.0, -0.5];
        assert_eq!(step(&x, &v, 1.0, UpdateOption::I, 1.0), v.to_vec());
        assert_eq!(step(&x, &v, 0.0, UpdateOption::I, 0.5), x.to_vec());
        assert_eq!(step(&x, &v, 0.37, UpdateOption::I, 1.0), step(&x, &v, 0.37, UpdateOption::II, 1.0));
        let y = step(&x, &v, 1.0, UpdateOption::II, 0.5);
        assert_eq!(y, vec![2.0, 0.0, -1.0]);
    }

    #[test]
    fn backtracking_zero_direction_accepts_immediately() {
        let bt = backtracking_eta(quad_1d, &[0.7], &[0.7], 0.8, 0.5).unwrap();
        assert_eq!(bt, Backtrack { eta: 0.8, shrinks: 0, floored: false });
    }

    #[test]
    fn backtracking_hand_evaluated_boundary() {
        // lhs f(0) = 0, rhs ½ − ½ = 0, so the loop condition is false
        let bt = backtracking_eta(quad_1d, &[1.0], &[0.0], 1.0, 0.5).unwrap();
        assert_eq!(bt.eta, 1.0);
        assert_eq!(bt.shrinks, 0);
    }

    #[test]
    fn backtracking_quartic_needs_two_shrinks() {
        // f = x⁴, x = 2, v = −6: η=1 gives 1296 > −16, η=½ gives 16 > 0,
        // η=¼ gives 0 <= 8.
        let quartic = |x: &[f64]| Ok(x[0].powi(4));
        let bt = backtracking_eta(quartic, &[2.0], &[-6.0], 1.0, 0.5).unwrap();
        assert_eq!(bt, Backtrack { eta: 0.25, shrinks: 2, floored: false });
    }

    #[test]
    fn backtracking_floor_and_errors() {
        // f increases along every step toward v
        let bt = backtracking_eta(|x: &[f64]| Ok(-x[0]), &[0.0], &[-1.0], 1.0, 0.5).unwrap();
        assert!(bt.floored);
        assert_eq!(bt.eta, BACKTRACK_FLOOR);
        let nan = backtracking_eta(|_: &[f64]| Ok(f64::NAN), &[0.0], &[1.0], 1.0, 0.5);
        assert!(matches!(nan, Err(GscoError::Numeric { .. })));
        assert!(backtracking_eta(quad_1d, &[0.0], &[1.0], 1.0, 1.0).is_err());
    }

    #[test]
    fn demyanov_rubinov_examples() {
        assert_eq!(demyanov_rubinov_eta(&[1.0, 2.0], &[0.5, 0.5], &[0.5, 0.5], 1.0), 0.0);
        // ⟨−g, v−x⟩ = L‖v−x‖²
        assert_eq!(demyanov_rubinov_eta(&[-2.0], &[1.0], &[0.0], 2.0), 1.0);
        assert_eq!(demyanov_rubinov_eta(&[1.0], &[-1.0], &[1.0], 1.0), 0.5);
        // ascent direction clamps to zero
        assert_eq!(demyanov_rubinov_eta(&[1.0], &[2.0], &[1.0], 1.0), 0.0);
    }

    #[test]
    fn open_loop_schedule() {
        assert_eq!(open_loop_eta(0), 1.0);
        for t in 0..50 {
            assert!(open_loop_eta(t + 1) < open_loop_eta(t));
            assert_eq!(open_loop_eta(t), 2.0 / (t as f64 + 2.0));
        }
    }

    #[test]
    fn config_validation() {
        let base = SolverConfig::new(DmoSelection::new(DmoVariant::Exact));
        assert!(base.validate().is_ok());
        let mut c = base.clone();
        c.delta = 0.0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.variant = FwVariant::AccFw;
        assert!(c.validate().is_err());
        c.lipschitz = Some(2.0);
        assert!(c.validate().is_ok());
        c.step_rule = StepRule::Backtracking { beta: 0.5, eta_init: 1.0 };
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.step_rule = StepRule::Backtracking { beta: 1.5, eta_init: 1.0 };
        assert!(c.validate().is_err());
        let mut c = base;
        c.max_iters = 0;
        assert!(c.validate().is_err());
    }

    fn small_instance(seed: u64, sigma: f64) -> (LeastSquaresObjective, ConstraintModel) {
        let model = ConstraintModel::cardinality(8, 8, 1.0).unwrap();
        let inst = generate_instance(&InstanceSpec { d: 8, n: 6, sigma, model: model.clone(), seed }).unwrap();
        (inst.objective, model)
    }

    #[test]
    fn best_so_far_never_worse_than_start() {
        let (obj, model) = small_instance(1, 0.0);
        let mut cfg = SolverConfig::new(DmoSelection::new(DmoVariant::Exact));
        cfg.max_iters = 200;
        let out = solve(&cfg, &obj, &model, None).unwrap();
        let f0 = obj.evaluate(&[0.0; 8]).unwrap();
        assert!(out.f_best <= f0);
        let min = out.trace.objectives().fold(f64::INFINITY, f64::min);
        assert_eq!(out.f_best, min);
        assert_eq!(out.trace.best_objective, min);
        assert_eq!(obj.evaluate(&out.x_best).unwrap(), out.f_best);
    }

    #[test]
    fn converges_under_relative_tolerance() {
        let (obj, model) = small_instance(2, 0.01);
        let mut cfg = SolverConfig::new(DmoSelection::new(DmoVariant::Exact));
        cfg.step_rule = StepRule::Backtracking { beta: 0.5, eta_init: 1.0 };
        cfg.max_iters = 5000;
        let out = solve(&cfg, &obj, &model, None).unwrap();
        assert_eq!(out.trace.termination, Termination::Converged);
        let recs = &out.trace.records;
        let (a, b) = (recs[recs.len() - 2].objective, recs[recs.len() - 1].objective);
        assert!(((b - a) / a).abs() <= 1e-6);
    }

    #[test]
    fn stationary_when_gradient_vanishes() {
        // y = 0 and x0 = 0: the gradient is zero at the start
        let obj = LeastSquaresObjective::new(Matrix::identity(3), vec![0.0; 3]).unwrap();
        let model = ConstraintModel::cardinality(3, 2, 1.0).unwrap();
        let cfg = SolverConfig::new(DmoSelection::new(DmoVariant::Exact));
        let out = solve(&cfg, &obj, &model, None).unwrap();
        // f(0) = 0 triggers the zero-objective guard first
        assert_eq!(out.trace.termination, Termination::Converged);
        let obj = LeastSquaresObjective::new(Matrix::identity(3), vec![1.0, 0.0, 0.0]).unwrap();
        let out = solve(&cfg, &obj, &model, Some(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(out.trace.termination, Termination::Converged);
        assert_eq!(out.trace.iterations(), 0);
        let obj = LeastSquaresObjective::new(Matrix::from_row_major(1, 3, vec![1.0, 0.0, 0.0]).unwrap(), vec![1.0]).unwrap();
        let out = solve(&cfg, &obj, &model, Some(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(out.trace.iterations(), 1);
        assert_eq!(out.f_best, 0.0);
        // y outside the range of A: f > 0 but the gradient at 0 vanishes
        let a = Matrix::from_row_major(2, 3, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let obj = LeastSquaresObjective::new(a, vec![0.0, 1.0]).unwrap();
        let out = solve(&cfg, &obj, &model, None).unwrap();
        assert_eq!(out.trace.termination, Termination::Stationary);
        assert_eq!(out.f_best, 0.5);
    }

    #[test]
    fn dimension_mismatch() {
        let (obj, model) = small_instance(3, 0.0);
        let cfg = SolverConfig::new(DmoSelection::new(DmoVariant::Exact));
        assert!(matches!(
            solve(&cfg, &obj, &model, Some(&[0.0; 3])),
            Err(GscoError::Dimension { .. })
        ));
    }

    #[test]
    fn accfw_and_demyanov_rubinov_run() {
        let (obj, model) = small_instance(4, 0.01);
        let l = obj.lipschitz_constant(1e-10).unwrap();
        let mut cfg = SolverConfig::new(DmoSelection::new(DmoVariant::Exact));
        cfg.variant = FwVariant::AccFw;
        cfg.lipschitz = Some(l);
        cfg.max_iters = 100;
        let f0 = obj.evaluate(&[0.0; 8]).unwrap();
        let acc = solve(&cfg, &obj, &model, None).unwrap();
        // the AccFW dual vector points along +∇f at the origin, so only the
        // argmin-return contract is asserted here
        assert!(acc.f_best <= f0);
        assert_eq!(acc.trace.iterations(), 100);
        cfg.step_rule = StepRule::DemyanovRubinov { lipschitz: l };
        cfg.variant = FwVariant::Fw;
        let dr = solve(&cfg, &obj, &model, None).unwrap();
        assert!(dr.f_best < f0);
    }
}
