//! Weighted means of tuples of positive definite matrices.

mod solvers;

pub use solvers::{
    karcher_mean, renyi_power_mean, wasserstein_barycenter, InitialGuess, SolverConfig,
    SolverTrace,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hpd::{check_same_dim, congruence, CMatrix, HermitianMatrix, HpdMatrix};

/// Below this `|p|` the quasi-arithmetic mean is replaced by the
/// log-Euclidean mean.
pub const QUASI_LOG_SWITCH: f64 = 1e-4;

/// Largest accepted `|p|` for the quasi-arithmetic mean.
pub const QUASI_MAX_EXPONENT: f64 = 64.0;

/// Positive probability vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    /// Normalizes positive finite weights to sum to one.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("weight vector is empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Domain(format!("weights must be positive and finite, got {w}")));
        }
        let total: f64 = weights.iter().sum();
        Ok(Self {
            weights: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    /// `(1 − t, t)` for `t ∈ (0, 1)`.
    pub fn pair(t: f64) -> Result<Self> {
        Self::new(vec![1.0 - t, t])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// `ω_σ = (w_{σ(1)}, …, w_{σ(n)})`.
    pub fn permuted(&self, sigma: &[usize]) -> Result<Self> {
        check_permutation(sigma, self.len())?;
        Ok(Self {
            weights: sigma.iter().map(|&i| self.weights[i]).collect(),
        })
    }

    /// `ω^{(k)} = (ω, …, ω) / k`.
    pub fn repeated(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("repetition count must be positive".into()));
        }
        Self::new(self.weights.repeat(k))
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.weights
    }
}

fn check_permutation(sigma: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if sigma.len() != n {
        return Err(Error::DimensionMismatch(sigma.len(), n));
    }
    for &i in sigma {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Domain(format!("{sigma:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// Non-empty tuple of positive definite matrices of one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    items: Vec<HpdMatrix>,
}

impl MatrixTuple {
    pub fn new(items: Vec<HpdMatrix>) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::Domain("matrix tuple is empty".into()))?;
        for a in &items[1..] {
            check_same_dim(first.dim(), a.dim())?;
        }
        Ok(Self { items })
    }

    pub fn constant(x: HpdMatrix, n: usize) -> Result<Self> {
        Self::new(vec![x; n])
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.items[0].dim()
    }

    pub fn items(&self) -> &[HpdMatrix] {
        &self.items
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HpdMatrix> {
        self.items.iter()
    }

    pub fn map(&self, f: impl Fn(&HpdMatrix) -> Result<HpdMatrix>) -> Result<Self> {
        Ok(Self {
            items: self.items.iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// `𝔸^p`.
    pub fn powered(&self, p: f64) -> Result<Self> {
        self.map(|a| a.pow(p))
    }

    /// `𝔸^{-1}`.
    pub fn inverted(&self) -> Result<Self> {
        self.map(HpdMatrix::inv)
    }

    /// `c𝔸` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|a| a.scale(c))
    }

    /// `S𝔸S*` for invertible `S`.
    pub fn congruence(&self, s: &CMatrix) -> Result<Self> {
        self.map(|a| congruence(s, a))
    }

    /// `𝔸_σ = (A_{σ(1)}, …, A_{σ(n)})`.
    pub fn permuted(&self, sigma: &[usize]) -> Result<Self> {
        check_permutation(sigma, self.len())?;
        Ok(Self {
            items: sigma.iter().map(|&i| self.items[i].clone()).collect(),
        })
    }

    /// `𝔸^{(k)} = (𝔸, …, 𝔸)` with `k` copies.
    pub fn repeated(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("repetition count must be positive".into()));
        }
        Ok(Self {
            items: (0..k).flat_map(|_| self.items.iter().cloned()).collect(),
        })
    }
}

pub(crate) fn check_weights(w: &WeightVector, a: &MatrixTuple) -> Result<()> {
    if w.len() != a.len() {
        return Err(Error::DimensionMismatch(w.len(), a.len()));
    }
    Ok(())
}

/// `Σ w_j H_j`.
pub(crate) fn weighted_sum<'a>(
    w: &WeightVector,
    terms: impl IntoIterator<Item = &'a HermitianMatrix>,
) -> Result<HermitianMatrix> {
    let mut acc: Option<HermitianMatrix> = None;
    for (wj, h) in w.as_slice().iter().zip(terms) {
        let term = h.scale(*wj);
        acc = Some(match acc {
            None => term,
            Some(s) => s.add(&term)?,
        });
    }
    acc.ok_or_else(|| Error::Domain("empty sum".into()))
}

/// `Q_p(ω; 𝔸) = (Σ w_j A_j^p)^{1/p}`.
///
/// `p = 0` is rejected; for `0 < |p| < 1e-4` the log-Euclidean mean is
/// returned instead, since `(·)^{1/p}` would amplify rounding by `1/p`.
pub fn quasi_arithmetic(p: f64, w: &WeightVector, a: &MatrixTuple) -> Result<HpdMatrix> {
    check_weights(w, a)?;
    if p == 0.0 || !p.is_finite() {
        return Err(Error::Domain(format!(
            "quasi-arithmetic exponent must be nonzero and finite, got {p}; use log_euclidean for p = 0"
        )));
    }
    if p.abs() > QUASI_MAX_EXPONENT {
        return Err(Error::Domain(format!(
            "quasi-arithmetic exponent {p} exceeds ±{QUASI_MAX_EXPONENT}"
        )));
    }
    if p.abs() < QUASI_LOG_SWITCH {
        log::debug!("quasi-arithmetic mean with |p| = {:e} evaluated as log-Euclidean", p.abs());
        return log_euclidean(w, a);
    }
    let powers = a.iter().map(|x| x.pow(p)).collect::<Result<Vec<_>>>()?;
    let sum = weighted_sum(w, powers.iter().map(HpdMatrix::as_hermitian))?;
    HpdMatrix::new(sum)?.pow(1.0 / p)
}

/// `LE(ω; 𝔸) = exp(Σ w_j log A_j)`.
pub fn log_euclidean(w: &WeightVector, a: &MatrixTuple) -> Result<HpdMatrix> {
    check_weights(w, a)?;
    let logs: Vec<HermitianMatrix> = a.iter().map(HpdMatrix::log).collect();
    weighted_sum(w, &logs)?.exp()
}

/// `𝒜(ω; 𝔸) = Σ w_j A_j`.
pub fn arithmetic_mean(w: &WeightVector, a: &MatrixTuple) -> Result<HpdMatrix> {
    quasi_arithmetic(1.0, w, a)
}

/// `ℋ(ω; 𝔸) = (Σ w_j A_j^{-1})^{-1}`.
pub fn harmonic_mean(w: &WeightVector, a: &MatrixTuple) -> Result<HpdMatrix> {
    quasi_arithmetic(-1.0, w, a)
}
