//! Dense Hermitian kernel: validated matrix types, the Jacobi eigensolver and
//! spectral matrix functions.
//!
//! Every value is immutable after construction. [`HpdMatrix`] carries its own
//! eigendecomposition, so fractional powers, logarithms and norms of a
//! positive definite matrix never re-diagonalize it.

mod eig;
mod spectral;

pub use eig::{eig_hermitian, EigenDecomposition};
pub use spectral::{apply_spectral_fn, ScalarFunction};
pub(crate) use spectral::assemble;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used for all storage.
pub type CMatrix = DMatrix<Complex64>;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 64;

/// Relative asymmetry absorbed by symmetrization at construction.
pub const HERMITIAN_TOL: f64 = 1e-13;

/// An m×m Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    data: CMatrix,
}

impl HermitianMatrix {
    /// Validates `m` and replaces it by `(m + m*)/2`.
    ///
    /// Asymmetry up to `1e-13 · max|entry|` is absorbed; anything larger is
    /// rejected.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_shape(&m)?;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let n = m.nrows();
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in i..n {
                asym = asym.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        let allowed = HERMITIAN_TOL * scale;
        if asym > allowed {
            return Err(Error::NotHermitian {
                asymmetry: asym,
                allowed,
            });
        }
        Ok(Self::hermitize(m))
    }

    /// `(m + m*)/2` without validation. For products that are Hermitian in
    /// exact arithmetic.
    pub(crate) fn hermitize(mut m: CMatrix) -> Self {
        let n = m.nrows();
        for i in 0..n {
            m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self { data: m }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(x, 0.0);
            }
        }
        Self::new(m)
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        check_dim(n)?;
        if d.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut m = CMatrix::zeros(n, n);
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        Ok(Self { data: m })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: CMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        eig_hermitian(self)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eig_hermitian(self)?.eigenvalues)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("dim >= 1"))
    }

    pub fn operator_norm(&self) -> Result<f64> {
        operator_norm(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.data[(i, i)].re).sum()
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            data: &self.data - &other.data,
        })
    }

    pub fn scale(&self, c: f64) -> HermitianMatrix {
        Self {
            data: self.data.map(|z| z * c),
        }
    }

    /// Exponential of a Hermitian matrix; always positive definite.
    pub fn exp(&self) -> Result<HpdMatrix> {
        let eig = self.eig()?;
        HpdMatrix::from_spectrum(eig.eigenvectors, eig.eigenvalues.iter().map(|l| l.exp()))
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()))
    }
}

/// A Hermitian matrix with strictly positive spectrum, stored together with
/// its eigendecomposition.
#[derive(Clone, Debug)]
pub struct HpdMatrix {
    herm: HermitianMatrix,
    eig: EigenDecomposition,
}

impl PartialEq for HpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.herm == other.herm
    }
}

impl HpdMatrix {
    /// Fails unless the computed smallest eigenvalue is strictly positive.
    pub fn new(herm: HermitianMatrix) -> Result<Self> {
        let eig = herm.eig()?;
        let lmin = eig.eigenvalues[0];
        if lmin > 0.0 {
            Ok(Self { herm, eig })
        } else {
            Err(Error::NotPositiveDefinite(lmin))
        }
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_rows(rows)?)
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::diagonal(d)?)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(HermitianMatrix::identity(n)).expect("identity is positive definite")
    }

    /// Builds `V diag(values) V*` for unitary `V`, keeping `(values, V)` as
    /// the stored decomposition.
    pub(crate) fn from_spectrum(
        vectors: CMatrix,
        values: impl IntoIterator<Item = f64>,
    ) -> Result<Self> {
        let values: Vec<f64> = values.into_iter().collect();
        if values.iter().any(|l| !l.is_finite()) {
            return Err(Error::Numerical("non-finite eigenvalue in spectral map".into()));
        }
        let herm = spectral::assemble(&vectors, &values);
        let eig = EigenDecomposition::sorted(values, vectors);
        let lmin = eig.eigenvalues[0];
        if lmin > 0.0 {
            Ok(Self { herm, eig })
        } else {
            Err(Error::NotPositiveDefinite(lmin))
        }
    }

    /// Positive definite result of a product that is Hermitian in exact
    /// arithmetic (e.g. `S X S` with `S`, `X` Hermitian).
    pub(crate) fn from_product(m: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::hermitize(m))
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.herm
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.herm
    }

    pub fn matrix(&self) -> &CMatrix {
        self.herm.matrix()
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eig.eigenvalues.last().expect("dim >= 1")
    }

    pub fn operator_norm(&self) -> f64 {
        self.max_eigenvalue()
    }

    pub fn condition_number(&self) -> f64 {
        self.max_eigenvalue() / self.min_eigenvalue()
    }

    pub fn pow(&self, p: f64) -> Result<HpdMatrix> {
        if p == 1.0 {
            return Ok(self.clone());
        }
        self.map_spectrum(|l| l.powf(p))
    }

    pub fn sqrt(&self) -> Result<HpdMatrix> {
        self.map_spectrum(f64::sqrt)
    }

    pub fn inv(&self) -> Result<HpdMatrix> {
        self.map_spectrum(f64::recip)
    }

    pub fn inv_sqrt(&self) -> Result<HpdMatrix> {
        self.map_spectrum(|l| l.sqrt().recip())
    }

    pub fn log(&self) -> HermitianMatrix {
        let logs: Vec<f64> = self.eig.eigenvalues.iter().map(|l| l.ln()).collect();
        spectral::assemble(&self.eig.eigenvectors, &logs)
    }

    pub fn log_det(&self) -> f64 {
        log_det(self)
    }

    pub fn scale(&self, c: f64) -> Result<HpdMatrix> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("scale factor must be positive, got {c}")));
        }
        self.map_spectrum(|l| c * l)
    }

    /// `V diag(f(λ)) V*` for a map that keeps the spectrum positive.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<HpdMatrix> {
        HpdMatrix::from_spectrum(
            self.eig.eigenvectors.clone(),
            self.eig.eigenvalues.iter().map(|&l| f(l)),
        )
    }

    /// `self · x · self` for Hermitian `x`.
    pub fn sandwich(&self, x: &CMatrix) -> CMatrix {
        let m = self.matrix();
        m * x * m
    }
}

impl From<HpdMatrix> for HermitianMatrix {
    fn from(a: HpdMatrix) -> Self {
        a.herm
    }
}

/// `M · A · M*` for invertible `M`.
pub fn congruence(m: &CMatrix, a: &HpdMatrix) -> Result<HpdMatrix> {
    check_shape(m)?;
    check_same_dim(m.nrows(), a.dim())?;
    let sv = singular_values(m)?;
    let (smin, smax) = (sv[0], sv[sv.len() - 1]);
    if !(smin > 1e-12 * smax) {
        return Err(Error::Domain(format!(
            "congruence by a singular matrix (singular values {smin:e}..{smax:e})"
        )));
    }
    HpdMatrix::from_product(m * a.matrix() * m.adjoint())
}

/// `max_i |λ_i(H)|`.
pub fn operator_norm(h: &HermitianMatrix) -> Result<f64> {
    let ev = h.eigenvalues()?;
    Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
}

/// `Σ_i log λ_i(A)`.
pub fn log_det(a: &HpdMatrix) -> f64 {
    a.eigenvalues().iter().map(|l| l.ln()).sum()
}

/// Ascending singular values of a square matrix.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let gram = HermitianMatrix::hermitize(m.adjoint() * m);
    Ok(gram
        .eigenvalues()?
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect())
}

/// Spectral norm of an arbitrary square matrix.
pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    Ok(*singular_values(m)?.last().expect("non-empty"))
}

pub(crate) fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a, b))
    }
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(n))
    }
}

fn check_shape(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    check_dim(m.nrows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symmetrizes_small_asymmetry() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 1e-15), c(0.5, 0.0), c(2.0, 0.0)]);
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.matrix()[(0, 1)], h.matrix()[(1, 0)].conj());
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.6, 0.0), c(2.0, 0.0)]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_non_square_and_empty() {
        assert!(matches!(
            HermitianMatrix::new(CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        assert!(HermitianMatrix::diagonal(&[]).is_err());
        assert!(HermitianMatrix::new(CMatrix::identity(MAX_DIM + 1, MAX_DIM + 1)).is_err());
    }

    #[test]
    fn positivity_is_strict() {
        assert!(matches!(
            HpdMatrix::diagonal(&[1.0, 0.0]),
            Err(Error::NotPositiveDefinite(_))
        ));
        assert!(HpdMatrix::diagonal(&[1.0, -2.0]).is_err());
        assert!(HpdMatrix::diagonal(&[1.0, 1e-300]).is_ok());
    }

    #[test]
    fn congruence_by_diagonal() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(1.0, 0.0)]));
        let r = congruence(&m, &HpdMatrix::identity(2)).unwrap();
        assert_eq!(r.eigenvalues(), &[1.0, 4.0]);
        assert_abs_diff_eq!(r.matrix()[(0, 0)].re, 4.0);
    }

    #[test]
    fn congruence_rejects_singular() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(matches!(
            congruence(&m, &HpdMatrix::identity(2)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn operator_norm_examples() {
        let h = HermitianMatrix::diagonal(&[-3.0, 2.0]).unwrap();
        assert_eq!(operator_norm(&h).unwrap(), 3.0);
        assert_eq!(operator_norm(&HermitianMatrix::identity(3)).unwrap(), 1.0);
    }

    #[test]
    fn log_det_examples() {
        assert_eq!(log_det(&HpdMatrix::identity(4)), 0.0);
        let a = HpdMatrix::diagonal(&[1.0, 4.0]).unwrap();
        assert_abs_diff_eq!(log_det(&a), 4f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn scale_requires_positive_factor() {
        let a = HpdMatrix::identity(2);
        assert!(a.scale(0.0).is_err());
        assert_eq!(a.scale(3.0).unwrap().eigenvalues(), &[3.0, 3.0]);
    }
}
