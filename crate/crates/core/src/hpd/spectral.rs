use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, HermitianMatrix, HpdMatrix};
use crate::error::{Error, Result};

/// Scalar map lifted to Hermitian matrices through the spectral theorem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScalarFunction {
    Power(f64),
    Log,
    Exp,
}

impl ScalarFunction {
    /// Whether the map is only defined for positive arguments.
    pub fn needs_positive(&self) -> bool {
        match *self {
            ScalarFunction::Power(p) => p.fract() != 0.0 || p < 0.0,
            ScalarFunction::Log => true,
            ScalarFunction::Exp => false,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ScalarFunction::Power(p) if p == 1.0 => x,
            ScalarFunction::Power(p) if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 => {
                x.powi(p as i32)
            }
            ScalarFunction::Power(p) => x.powf(p),
            ScalarFunction::Log => x.ln(),
            ScalarFunction::Exp => x.exp(),
        }
    }
}

/// `V · diag(f(λ)) · V*`.
///
/// Logarithms, negative powers and non-integer powers require a positive
/// definite argument.
pub fn apply_spectral_fn(h: &HermitianMatrix, f: ScalarFunction) -> Result<HermitianMatrix> {
    let eig = h.eig()?;
    if f.needs_positive() && eig.eigenvalues[0] <= 0.0 {
        return Err(Error::Domain(format!(
            "{f:?} needs a positive definite argument (smallest eigenvalue {:e})",
            eig.eigenvalues[0]
        )));
    }
    let values: Vec<f64> = eig.eigenvalues.iter().map(|&l| f.eval(l)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("{f:?} overflowed on the spectrum")));
    }
    Ok(assemble(&eig.eigenvectors, &values))
}

impl HpdMatrix {
    /// Spectral map on the cached decomposition; the result must stay
    /// positive definite (powers and exp).
    pub fn apply(&self, f: ScalarFunction) -> Result<HpdMatrix> {
        match f {
            ScalarFunction::Log => Err(Error::Domain(
                "log of a positive definite matrix is Hermitian, use HpdMatrix::log".into(),
            )),
            ScalarFunction::Power(p) => self.pow(p),
            ScalarFunction::Exp => self.map_spectrum(f64::exp),
        }
    }
}

/// Assembles `V diag(d) V*` as an exactly Hermitian matrix.
pub(crate) fn assemble(v: &CMatrix, d: &[f64]) -> HermitianMatrix {
    let n = d.len();
    let mut scaled = v.clone();
    for (k, &dk) in d.iter().enumerate() {
        scaled.column_mut(k).scale_mut(dk);
    }
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += scaled[(i, k)] * v[(j, k)].conj();
            }
            if i == j {
                m[(i, i)] = Complex64::new(acc.re, 0.0);
            } else {
                m[(i, j)] = acc;
                m[(j, i)] = acc.conj();
            }
        }
    }
    HermitianMatrix { data: m }
}
