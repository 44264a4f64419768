//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each step annihilates one off-diagonal pair `(p, q)` with the unitary
//! `G = diag(1, e^{-iφ}) · R(θ)`, where `φ = arg a_pq` turns the 2×2 block real
//! and `R(θ)` is the classical real Jacobi rotation. Sweeps run over all
//! pairs in row order until the off-diagonal Frobenius norm drops below
//! `1e-14 · ‖H‖_F`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{spectral, CMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Off-diagonal Frobenius threshold relative to `‖H‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Rotation budget per unit of `m²`.
pub const ROTATIONS_PER_DIM_SQ: usize = 30;

/// Ascending real eigenvalues with a unitary matrix of column eigenvectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    #[serde(skip, default = "empty_matrix")]
    pub eigenvectors: CMatrix,
}

fn empty_matrix() -> CMatrix {
    CMatrix::zeros(0, 0)
}

impl EigenDecomposition {
    /// Sorts eigenpairs ascending.
    pub(crate) fn sorted(values: Vec<f64>, vectors: CMatrix) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        if order.iter().enumerate().all(|(k, &i)| k == i) {
            return Self {
                eigenvalues: values,
                eigenvectors: vectors,
            };
        }
        let eigenvalues = order.iter().map(|&i| values[i]).collect();
        let eigenvectors = CMatrix::from_fn(n, n, |r, k| vectors[(r, order[k])]);
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in descending order.
    pub fn descending(&self) -> Vec<f64> {
        self.eigenvalues.iter().rev().copied().collect()
    }

    /// `V diag(λ) V*`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        spectral::assemble(&self.eigenvectors, &self.eigenvalues)
    }

    /// `‖V diag(λ) V* − H‖_op`.
    pub fn reconstruction_residual(&self, h: &HermitianMatrix) -> Result<f64> {
        let diff = self.reconstruct().sub(h)?;
        diff.operator_norm()
    }

    /// `‖V* V − I‖_op`.
    pub fn unitarity_residual(&self) -> Result<f64> {
        let n = self.dim();
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors - CMatrix::identity(n, n);
        HermitianMatrix::hermitize(gram).operator_norm()
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Deterministic; fails only if the rotation cap `30·m²` is exhausted before
/// the off-diagonal mass falls under the threshold.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = CMatrix::identity(n, n);
    let fro = h.frobenius_norm();
    let threshold = OFF_DIAGONAL_TOL * fro;
    let max_rotations = ROTATIONS_PER_DIM_SQ * n * n;
    let mut rotations = 0usize;

    while off_diagonal_norm(&a) > threshold {
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                if a[(p, q)].norm() == 0.0 {
                    continue;
                }
                if rotations >= max_rotations {
                    return Err(Error::Numerical(format!(
                        "Jacobi eigensolver exhausted {max_rotations} rotations (off-diagonal norm {:e}, threshold {threshold:e})",
                        off_diagonal_norm(&a)
                    )));
                }
                rotate(&mut a, &mut v, p, q);
                rotations += 1;
            }
        }
    }

    let values = (0..n).map(|i| a[(i, i)].re).collect();
    Ok(EigenDecomposition::sorted(values, v))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = a.nrows();
    let apq = a[(p, q)];
    let r = apq.norm();
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] acting on columns p, q.
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let x = a[(k, p)];
        let y = a[(k, q)];
        let kp = x * c + y * g_qp;
        let kq = x * s + y * g_qq;
        a[(k, p)] = kp;
        a[(k, q)] = kq;
        a[(p, k)] = kp.conj();
        a[(q, k)] = kq.conj();
    }
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * c + y * g_qp;
        v[(k, q)] = x * s + y * g_qq;
    }
}
