//! Two-variable means and distances on the positive definite cone.
//!
//! All geometric constructions go through `A^{-1} # B`, computed by the closed
//! form `A^{-1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}`. The midpoint form
//! [`metric_geometric`]`(A^{-1}, B, 1/2)` is an independent route to the same
//! matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hpd::{check_same_dim, CMatrix, HermitianMatrix, HpdMatrix};

/// Smallest eigenvalue `I ∇_t (A^{-1} # B)` must keep for the Wasserstein
/// mean outside `[0, 1]`.
pub const WASSERSTEIN_FACTOR_MARGIN: f64 = 1e-12;

/// Rounding allowance below zero for the squared Bures-Wasserstein distance,
/// relative to `max(1, tr(A + B))`.
pub const BURES_ROUNDING: f64 = 1e-12;

fn check_pair(a: &HpdMatrix, b: &HpdMatrix) -> Result<()> {
    check_same_dim(a.dim(), b.dim())
}

fn check_param(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("mean parameter must be finite, got {t}")))
    }
}

/// `(1 − t) A + t B`. Positive definite for `t ∈ [0, 1]`.
pub fn weighted_arithmetic(a: &HpdMatrix, b: &HpdMatrix, t: f64) -> Result<HermitianMatrix> {
    check_pair(a, b)?;
    check_param(t)?;
    a.as_hermitian()
        .scale(1.0 - t)
        .add(&b.as_hermitian().scale(t))
}

/// [`weighted_arithmetic`] as a positive definite matrix; fails if the
/// combination is not positive definite.
pub fn weighted_arithmetic_hpd(a: &HpdMatrix, b: &HpdMatrix, t: f64) -> Result<HpdMatrix> {
    HpdMatrix::new(weighted_arithmetic(a, b, t)?)
}

/// `A^{-1} # B = A^{-1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}`.
pub fn inverse_geometric_mean(a: &HpdMatrix, b: &HpdMatrix) -> Result<HpdMatrix> {
    check_pair(a, b)?;
    let s = a.sqrt()?;
    let si = a.inv_sqrt()?;
    let inner = HpdMatrix::from_product(s.sandwich(b.matrix()))?;
    let root = inner.sqrt()?;
    HpdMatrix::from_product(si.sandwich(root.matrix()))
}

/// `A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`, any real `t`.
pub fn metric_geometric(a: &HpdMatrix, b: &HpdMatrix, t: f64) -> Result<HpdMatrix> {
    check_pair(a, b)?;
    check_param(t)?;
    let s = a.sqrt()?;
    let si = a.inv_sqrt()?;
    let inner = HpdMatrix::from_product(si.sandwich(b.matrix()))?;
    let p = inner.pow(t)?;
    HpdMatrix::from_product(s.sandwich(p.matrix()))
}

/// `A # B`.
pub fn geometric(a: &HpdMatrix, b: &HpdMatrix) -> Result<HpdMatrix> {
    metric_geometric(a, b, 0.5)
}

/// `A ♮_t B = (A^{-1} # B)^t A (A^{-1} # B)^t`, any real `t`.
pub fn spectral_geometric(a: &HpdMatrix, b: &HpdMatrix, t: f64) -> Result<HpdMatrix> {
    check_param(t)?;
    let c = inverse_geometric_mean(a, b)?;
    let ct = c.pow(t)?;
    HpdMatrix::from_product(ct.sandwich(a.matrix()))
}

/// `I ∇_t (A^{-1} # B)`, built on the eigenbasis of `A^{-1} # B`.
fn wasserstein_factor(c: &HpdMatrix, t: f64) -> Result<HpdMatrix> {
    let values: Vec<f64> = c
        .eigenvalues()
        .iter()
        .map(|&l| (1.0 - t) + t * l)
        .collect();
    let lmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(lmin > WASSERSTEIN_FACTOR_MARGIN) {
        return Err(Error::Domain(format!(
            "I ∇_t (A^-1 # B) is not positive definite at t = {t} (smallest eigenvalue {lmin:e})"
        )));
    }
    HpdMatrix::from_spectrum(c.eigen().eigenvectors.clone(), values)
}

/// `A ◇_t B = [I ∇_t (A^{-1} # B)] A [I ∇_t (A^{-1} # B)]`.
///
/// Defined for every `t ∈ [0, 1]`; outside that range only while the
/// congruence factor stays positive definite.
pub fn wasserstein_mean(a: &HpdMatrix, b: &HpdMatrix, t: f64) -> Result<HpdMatrix> {
    check_param(t)?;
    let c = inverse_geometric_mean(a, b)?;
    let k = wasserstein_factor(&c, t)?;
    HpdMatrix::from_product(k.sandwich(a.matrix()))
}

/// Expanded form `(1−t)² A + t² B + t(1−t) [A C + C A]` with `C = A^{-1} # B`.
pub fn wasserstein_mean_polynomial(a: &HpdMatrix, b: &HpdMatrix, t: f64) -> Result<HermitianMatrix> {
    check_param(t)?;
    let c = inverse_geometric_mean(a, b)?;
    let am = a.matrix();
    let cm = c.matrix();
    let ac = am * cm;
    let r = |x: f64| Complex64::new(x, 0.0);
    let m: CMatrix = am * r((1.0 - t) * (1.0 - t))
        + b.matrix() * r(t * t)
        + (&ac + ac.adjoint()) * r(t * (1.0 - t));
    HermitianMatrix::new(m)
}

/// Operator fidelity `F(A, B) = (A^{1/2} B A^{1/2})^{1/2}`.
pub fn fidelity(a: &HpdMatrix, b: &HpdMatrix) -> Result<HpdMatrix> {
    check_pair(a, b)?;
    let s = a.sqrt()?;
    HpdMatrix::from_product(s.sandwich(b.matrix()))?.sqrt()
}

/// Thompson metric `‖log A^{-1/2} B A^{-1/2}‖`.
pub fn thompson_distance(a: &HpdMatrix, b: &HpdMatrix) -> Result<f64> {
    check_pair(a, b)?;
    let si = a.inv_sqrt()?;
    let inner = HpdMatrix::from_product(si.sandwich(b.matrix()))?;
    Ok(max_abs_log(inner.eigenvalues()))
}

/// Bures-Wasserstein distance `[tr(A + B) − 2 tr (A^{1/2} B A^{1/2})^{1/2}]^{1/2}`.
pub fn bures_wasserstein_distance(a: &HpdMatrix, b: &HpdMatrix) -> Result<f64> {
    check_pair(a, b)?;
    let s = a.sqrt()?;
    let inner = HpdMatrix::from_product(s.sandwich(b.matrix()))?;
    let tr_f: f64 = inner.eigenvalues().iter().map(|l| l.sqrt()).sum();
    let tr_sum = a.as_hermitian().trace() + b.as_hermitian().trace();
    let sq = tr_sum - 2.0 * tr_f;
    if sq >= 0.0 {
        Ok(sq.sqrt())
    } else if sq >= -BURES_ROUNDING * tr_sum.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!(
            "squared Bures-Wasserstein distance is negative ({sq:e})"
        )))
    }
}

/// Semimetric `2 ‖log (A^{-1} # B)‖` for which `♮_t` is a geodesic.
pub fn spectral_semimetric(a: &HpdMatrix, b: &HpdMatrix) -> Result<f64> {
    let c = inverse_geometric_mean(a, b)?;
    Ok(2.0 * max_abs_log(c.eigenvalues()))
}

fn max_abs_log(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |acc, l| acc.max(l.ln().abs()))
}
