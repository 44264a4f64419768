//! Fixed-point solvers for the implicitly defined means.

use serde::{Deserialize, Serialize};

use super::{arithmetic_mean, check_weights, log_euclidean, weighted_sum, MatrixTuple, WeightVector};
use crate::error::{Error, Result};
use crate::hpd::{check_same_dim, HermitianMatrix, HpdMatrix};

/// Smallest exponent step the Karcher iteration may damp down to.
const KARCHER_MIN_STEP: f64 = 1.0 / 1_048_576.0;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialGuess {
    /// `Σ w_j A_j`.
    ArithmeticMean,
    /// `exp(Σ w_j log A_j)`.
    LogEuclidean,
    Identity,
    Matrix(HpdMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub residual_tol: f64,
    pub max_iter: usize,
    pub initial_guess: InitialGuess,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            max_iter: 500,
            initial_guess: InitialGuess::ArithmeticMean,
        }
    }
}

impl SolverConfig {
    pub fn new(residual_tol: f64, max_iter: usize) -> Result<Self> {
        let cfg = Self {
            residual_tol,
            max_iter,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_initial_guess(mut self, guess: InitialGuess) -> Self {
        self.initial_guess = guess;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0 && self.residual_tol.is_finite()) {
            return Err(Error::Domain(format!(
                "residual tolerance must be positive, got {}",
                self.residual_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    fn start(&self, w: &WeightVector, a: &MatrixTuple) -> Result<HpdMatrix> {
        match &self.initial_guess {
            InitialGuess::ArithmeticMean => arithmetic_mean(w, a),
            InitialGuess::LogEuclidean => log_euclidean(w, a),
            InitialGuess::Identity => Ok(HpdMatrix::identity(a.dim())),
            InitialGuess::Matrix(x) => {
                check_same_dim(x.dim(), a.dim())?;
                Ok(x.clone())
            }
        }
    }
}

/// Residuals of the iterates; `iterations` counts map evaluations.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

impl SolverTrace {
    pub fn last_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }

    fn push(&mut self, r: f64) {
        self.iterations += 1;
        self.residual_history.push(r);
    }
}

/// `‖X − Y‖_op / max(1, ‖X‖_op)`.
fn relative_step(x: &HpdMatrix, y: &HpdMatrix) -> Result<f64> {
    let diff = x.as_hermitian().sub(y.as_hermitian())?.operator_norm()?;
    Ok(diff / 1f64.max(x.operator_norm()))
}

/// Picard iteration `X ← f(X)` until `‖X − f(X)‖_op ≤ tol · max(1, ‖X‖_op)`;
/// returns the verified iterate `X`.
fn picard(
    x0: HpdMatrix,
    cfg: &SolverConfig,
    f: impl Fn(&HpdMatrix) -> Result<HpdMatrix>,
) -> Result<(HpdMatrix, SolverTrace)> {
    let mut trace = SolverTrace::default();
    let mut x = x0;
    for _ in 0..cfg.max_iter {
        let fx = f(&x)?;
        let r = relative_step(&x, &fx)?;
        if !r.is_finite() {
            return Err(Error::Numerical("fixed-point residual is not finite".into()));
        }
        trace.push(r);
        if r <= cfg.residual_tol {
            trace.converged = true;
            return Ok((x, trace));
        }
        x = fx;
    }
    Err(Error::NotConverged { trace })
}

/// Rényi power mean `R_{t,z}(ω; 𝔸)`: the fixed point of
/// `X = Σ w_j (A_j^{(1−t)/(2z)} X^{t/z} A_j^{(1−t)/(2z)})^z` for `0 ≤ t < z ≤ 1`.
///
/// The map contracts the Thompson metric by the factor `t`, so Picard
/// iteration converges from any start.
pub fn renyi_power_mean(
    t: f64,
    z: f64,
    w: &WeightVector,
    a: &MatrixTuple,
    cfg: &SolverConfig,
) -> Result<(HpdMatrix, SolverTrace)> {
    check_weights(w, a)?;
    cfg.validate()?;
    if !(0.0 <= t && t < z && z <= 1.0) {
        return Err(Error::Domain(format!(
            "Rényi power mean needs 0 <= t < z <= 1, got t = {t}, z = {z}"
        )));
    }
    let outer = a
        .iter()
        .map(|aj| aj.pow((1.0 - t) / (2.0 * z)))
        .collect::<Result<Vec<_>>>()?;
    let f = |x: &HpdMatrix| -> Result<HpdMatrix> {
        let xp = x.pow(t / z)?;
        let terms = outer
            .iter()
            .map(|p| HpdMatrix::from_product(p.sandwich(xp.matrix()))?.pow(z))
            .collect::<Result<Vec<_>>>()?;
        HpdMatrix::new(weighted_sum(w, terms.iter().map(HpdMatrix::as_hermitian))?)
    };
    picard(cfg.start(w, a)?, cfg, f)
}

/// `Σ w_j log(X^{-1/2} A_j X^{-1/2})`.
fn karcher_gradient(x: &HpdMatrix, w: &WeightVector, a: &MatrixTuple) -> Result<HermitianMatrix> {
    let xis = x.inv_sqrt()?;
    let logs = a
        .iter()
        .map(|aj| Ok(HpdMatrix::from_product(xis.sandwich(aj.matrix()))?.log()))
        .collect::<Result<Vec<_>>>()?;
    weighted_sum(w, &logs)
}

/// Karcher mean `Λ(ω; 𝔸)`: the solution of `Σ w_j log(X^{1/2} A_j^{-1} X^{1/2}) = 0`.
///
/// Iterates `X ← X^{1/2} exp(α Σ w_j log(X^{-1/2} A_j X^{-1/2})) X^{1/2}` with
/// `α = 1`, halving `α` whenever a step would increase the residual
/// `‖Σ w_j log(X^{-1/2} A_j X^{-1/2})‖_op`.
pub fn karcher_mean(
    w: &WeightVector,
    a: &MatrixTuple,
    cfg: &SolverConfig,
) -> Result<(HpdMatrix, SolverTrace)> {
    check_weights(w, a)?;
    cfg.validate()?;
    let mut trace = SolverTrace::default();
    let mut x = cfg.start(w, a)?;
    let mut grad = karcher_gradient(&x, w, a)?;
    let mut res = grad.operator_norm()?;
    let mut step = 1.0;
    trace.push(res);
    while trace.iterations < cfg.max_iter {
        if res <= cfg.residual_tol {
            trace.converged = true;
            return Ok((x, trace));
        }
        let candidate = HpdMatrix::from_product(x.sqrt()?.sandwich(grad.scale(step).exp()?.matrix()))?;
        let cand_grad = karcher_gradient(&candidate, w, a)?;
        let cand_res = cand_grad.operator_norm()?;
        if !cand_res.is_finite() {
            return Err(Error::Numerical("Karcher residual is not finite".into()));
        }
        if cand_res > res {
            step *= 0.5;
            if step < KARCHER_MIN_STEP {
                break;
            }
            trace.push(res);
            continue;
        }
        x = candidate;
        grad = cand_grad;
        res = cand_res;
        trace.push(res);
    }
    if res <= cfg.residual_tol {
        trace.converged = true;
        return Ok((x, trace));
    }
    Err(Error::NotConverged { trace })
}

/// Bures–Wasserstein barycenter `Ω(ω; 𝔸)`.
///
/// Fixed-point iteration
/// `X ← X^{-1/2} (Σ w_j (X^{1/2} A_j X^{1/2})^{1/2})² X^{-1/2}`.
pub fn wasserstein_barycenter(
    w: &WeightVector,
    a: &MatrixTuple,
    cfg: &SolverConfig,
) -> Result<(HpdMatrix, SolverTrace)> {
    check_weights(w, a)?;
    cfg.validate()?;
    let f = |x: &HpdMatrix| -> Result<HpdMatrix> {
        let xs = x.sqrt()?;
        let roots = a
            .iter()
            .map(|aj| HpdMatrix::from_product(xs.sandwich(aj.matrix()))?.sqrt())
            .collect::<Result<Vec<_>>>()?;
        let s = HpdMatrix::new(weighted_sum(w, roots.iter().map(HpdMatrix::as_hermitian))?)?;
        let s2 = s.pow(2.0)?;
        HpdMatrix::from_product(x.inv_sqrt()?.sandwich(s2.matrix()))
    };
    picard(cfg.start(w, a)?, cfg, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> (WeightVector, MatrixTuple) {
        let a = HpdMatrix::diagonal(&[1.0, 4.0]).unwrap();
        let b = HpdMatrix::diagonal(&[9.0, 16.0]).unwrap();
        (WeightVector::uniform(2).unwrap(), MatrixTuple::new(vec![a, b]).unwrap())
    }

    fn dist(x: &HpdMatrix, d: &[f64]) -> f64 {
        x.as_hermitian()
            .max_abs_diff(&HermitianMatrix::diagonal(d).unwrap())
    }

    #[test]
    fn renyi_commuting_is_quasi() {
        let (w, a) = pair();
        let (x, trace) = renyi_power_mean(0.5, 0.75, &w, &a, &SolverConfig::default()).unwrap();
        assert!(trace.converged);
        assert!(dist(&x, &[4.0, 9.0]) < 1e-10, "{x:?}");
    }

    #[test]
    fn renyi_t_zero_is_arithmetic() {
        let (w, a) = pair();
        let (x, trace) = renyi_power_mean(0.0, 0.6, &w, &a, &SolverConfig::default()).unwrap();
        assert_eq!(trace.iterations, 1);
        assert!(dist(&x, &[5.0, 10.0]) < 1e-11);
    }

    #[test]
    fn renyi_rejects_bad_parameters() {
        let (w, a) = pair();
        let cfg = SolverConfig::default();
        for (t, z) in [(0.5, 0.5), (0.7, 0.5), (-0.1, 0.5), (0.2, 1.5)] {
            assert!(matches!(renyi_power_mean(t, z, &w, &a, &cfg), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn renyi_reports_non_convergence() {
        let (w, a) = pair();
        let cfg = SolverConfig::new(1e-15, 3).unwrap();
        match renyi_power_mean(0.9, 1.0, &w, &a, &cfg) {
            Err(Error::NotConverged { trace }) => {
                assert_eq!(trace.iterations, 3);
                assert!(!trace.converged);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn karcher_commuting() {
        let (w, a) = pair();
        let (x, trace) = karcher_mean(&w, &a, &SolverConfig::default()).unwrap();
        assert!(trace.converged && trace.last_residual() <= 1e-12);
        assert!(dist(&x, &[3.0, 8.0]) < 1e-11);
    }

    #[test]
    fn barycenter_commuting() {
        let (w, a) = pair();
        let (x, trace) = wasserstein_barycenter(&w, &a, &SolverConfig::default()).unwrap();
        assert!(trace.converged);
        assert!(dist(&x, &[4.0, 9.0]) < 1e-10);
    }

    #[test]
    fn constant_tuple_fixed_at_start() {
        let x = HpdMatrix::from_real_rows(&[[2.0, 0.5], [0.5, 1.0]]).unwrap();
        let a = MatrixTuple::constant(x.clone(), 3).unwrap();
        let w = WeightVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        let cfg = SolverConfig::default();
        for (m, _) in [
            karcher_mean(&w, &a, &cfg).unwrap(),
            wasserstein_barycenter(&w, &a, &cfg).unwrap(),
            renyi_power_mean(0.3, 0.8, &w, &a, &cfg).unwrap(),
        ] {
            assert!(m.as_hermitian().max_abs_diff(x.as_hermitian()) < 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 10).is_err());
        assert!(SolverConfig::new(1e-12, 0).is_err());
        let cfg = SolverConfig::default().with_initial_guess(InitialGuess::Matrix(HpdMatrix::identity(3)));
        let (w, a) = pair();
        assert!(karcher_mean(&w, &a, &cfg).is_err());
    }
}
