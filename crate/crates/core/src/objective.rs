//! Least-squares loss `½‖Ax − y‖²` and synthetic compressed-sensing instances.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{GscoError, Result};
use crate::linalg::{self, Matrix};
use crate::model::{grow_regions, ConstraintModel, ModelVariant};
use crate::rng::{stream_rng, STREAM_MATRIX, STREAM_NOISE, STREAM_TRUTH};
use crate::support::SupportSet;

/// Iteration limit for [`LeastSquaresObjective::lipschitz_constant`].
pub const MAX_POWER_ITERS: usize = 10_000;

/// Noise level used when an instance spec leaves it unset.
pub const DEFAULT_SIGMA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresObjective {
    a: Matrix,
    y: Vec<f64>,
}

impl LeastSquaresObjective {
    pub fn new(a: Matrix, y: Vec<f64>) -> Result<Self> {
        if y.len() != a.rows() {
            return Err(GscoError::Dimension {
                expected: a.rows(),
                got: y.len(),
            });
        }
        if a.as_slice().iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(GscoError::Config("objective data must be finite".into()));
        }
        Ok(LeastSquaresObjective { a, y })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn observations(&self) -> &[f64] {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn n_obs(&self) -> usize {
        self.a.rows()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GscoError::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `Ax − y`.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut r = self.a.mul_vec(x);
        for (ri, yi) in r.iter_mut().zip(&self.y) {
            *ri -= yi;
        }
        Ok(r)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(0.5 * linalg::norm_sq(&self.residual(x)?))
    }

    /// `Aᵀ(Ax − y)`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = self.residual(x)?;
        Ok(self.a.tr_mul_vec(&r))
    }

    /// Largest eigenvalue of `AᵀA` by power iteration from the all-ones
    /// vector, stopping when successive Rayleigh quotients agree to `tol`
    /// relative.
    pub fn lipschitz_constant(&self, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(GscoError::Config(format!("tolerance must be positive, got {tol}")));
        }
        let d = self.dim();
        let mut v = vec![1.0 / (d as f64).sqrt(); d];
        let mut prev = f64::NAN;
        for iter in 0..MAX_POWER_ITERS {
            let w = self.a.tr_mul_vec(&self.a.mul_vec(&v));
            let lambda = linalg::dot(&v, &w);
            let wn = linalg::norm(&w);
            if wn == 0.0 {
                return Ok(0.0);
            }
            if (lambda - prev).abs() <= tol * lambda.abs() {
                return Ok(lambda);
            }
            if !lambda.is_finite() {
                return Err(GscoError::Numeric {
                    iter,
                    msg: "power iteration diverged".into(),
                });
            }
            prev = lambda;
            v = w.into_iter().map(|x| x / wn).collect();
        }
        Err(GscoError::Numeric {
            iter: MAX_POWER_ITERS,
            msg: format!("power iteration did not reach tolerance {tol}"),
        })
    }
}

/// Parameters for a synthetic recovery instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub d: usize,
    pub n: usize,
    pub sigma: f64,
    pub model: ConstraintModel,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub objective: LeastSquaresObjective,
    pub x_star: Vec<f64>,
    pub truth_support: SupportSet,
}

/// Draws `A` with i.i.d. `N(0, 1/n)` entries, a unit-norm ground truth on a
/// feasible support, and `y = A x* + e` with `e ~ N(0, σ²)`.
pub fn generate_instance(spec: &InstanceSpec) -> Result<Instance> {
    if spec.n == 0 || spec.d == 0 {
        return Err(GscoError::Config("instance needs n >= 1 and d >= 1".into()));
    }
    if !(spec.sigma >= 0.0 && spec.sigma.is_finite()) {
        return Err(GscoError::Config(format!("sigma must be >= 0, got {}", spec.sigma)));
    }
    if spec.model.dim() != spec.d {
        return Err(GscoError::Dimension {
            expected: spec.d,
            got: spec.model.dim(),
        });
    }
    let scale = 1.0 / (spec.n as f64).sqrt();
    let mut rng = stream_rng(spec.seed, STREAM_MATRIX);
    let data: Vec<f64> = (0..spec.n * spec.d)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * scale)
        .collect();
    let a = Matrix::from_row_major(spec.n, spec.d, data)?;

    let mut rng = stream_rng(spec.seed, STREAM_TRUTH);
    let support = match spec.model.variant() {
        ModelVariant::GSubgraph { graph, s, g } => {
            let grown = grow_regions(graph, *s, *g, &mut rng);
            if grown.len() < *s {
                return Err(GscoError::Generation(format!(
                    "could only grow {} of {s} support nodes from {g} seeds",
                    grown.len()
                )));
            }
            grown
        }
        ModelVariant::CardinalityOnly { .. } => spec.model.random_support(&mut rng),
    };
    let mut x_star = vec![0.0; spec.d];
    for i in support.iter() {
        x_star[i] = rng.sample(StandardNormal);
    }
    let nrm = linalg::norm(&x_star);
    if nrm == 0.0 {
        return Err(GscoError::Generation("ground truth drew an all-zero vector".into()));
    }
    for v in x_star.iter_mut() {
        *v /= nrm;
    }

    let mut rng = stream_rng(spec.seed, STREAM_NOISE);
    let mut y = a.mul_vec(&x_star);
    if spec.sigma > 0.0 {
        for yi in y.iter_mut() {
            *yi += spec.sigma * rng.sample::<f64, _>(StandardNormal);
        }
    }
    Ok(Instance {
        objective: LeastSquaresObjective::new(a, y)?,
        x_star,
        truth_support: support,
    })
}
