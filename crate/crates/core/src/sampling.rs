//! Seeded generators of structured random instances.
//!
//! Every sampler draws from a ChaCha20 stream keyed by
//! `SHA-256("meanlab-sampler/v1" ‖ label ‖ seed)`, so each purpose label gets
//! an independent stream and adding a sampler never shifts the output of an
//! existing one. Output is a pure function of the [`SamplerSpec`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotics::Curve;
use crate::error::{Error, Result};
use crate::hpd::{CMatrix, HermitianMatrix, HpdMatrix};
use crate::multi::{MatrixTuple, WeightVector};

pub const MAX_SAMPLER_DIM: usize = 16;

const DOMAIN_TAG: &[u8] = b"meanlab-sampler/v1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub seed: u64,
    pub dim: usize,
    pub spectrum_range: (f64, f64),
    pub count: usize,
}

impl SamplerSpec {
    pub fn new(seed: u64, dim: usize, spectrum_range: (f64, f64), count: usize) -> Result<Self> {
        let spec = Self {
            seed,
            dim,
            spectrum_range,
            count,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_SAMPLER_DIM).contains(&self.dim) {
            return Err(Error::InvalidDimension(self.dim));
        }
        let (lo, hi) = self.spectrum_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Domain(format!(
                "spectrum range must satisfy 0 < lo <= hi < inf, got ({lo}, {hi})"
            )));
        }
        Ok(())
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.spectrum_range = (lo, hi);
        self
    }

    /// Spec for trial `index`, with a seed derived from `(seed, index)`.
    pub fn for_trial(&self, index: u64) -> Self {
        let mut h = Sha256::new();
        h.update(DOMAIN_TAG);
        h.update(b"trial");
        h.update(self.seed.to_le_bytes());
        h.update(index.to_le_bytes());
        let digest = h.finalize();
        let mut seed = [0u8; 8];
        seed.copy_from_slice(&digest[..8]);
        Self {
            seed: u64::from_le_bytes(seed),
            ..*self
        }
    }

    /// The generator for `label`.
    pub fn rng(&self, label: &str) -> ChaCha20Rng {
        let mut h = Sha256::new();
        h.update(DOMAIN_TAG);
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        h.update(self.seed.to_le_bytes());
        let digest = h.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        ChaCha20Rng::from_seed(key)
    }
}

/// Log-uniform draw from `[lo, hi]`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let u: f64 = rng.random();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp().clamp(lo, hi)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Unitary from the QR factorization of a complex Gaussian matrix, with
/// column phases fixed by the diagonal of `R`.
pub fn unitary_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let z = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..dim {
        let d = r[(k, k)];
        let n = d.norm();
        if n > 0.0 {
            let phase = d / n;
            for i in 0..dim {
                q[(i, k)] *= phase;
            }
        }
    }
    q
}

/// `U diag(λ) U*` with `λ` log-uniform in `[lo, hi]`.
pub fn hpd_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> Result<HpdMatrix> {
    let u = unitary_with(rng, dim);
    let values: Vec<f64> = (0..dim).map(|_| log_uniform(rng, lo, hi)).collect();
    HpdMatrix::new(crate::hpd::assemble(&u, &values))
}

/// Positive semidefinite `V diag(μ) V*` with `‖·‖_op` uniform in `[0, max_norm]`
/// and `μ_i = ‖·‖_op · u_i`, one `u_i` equal to 1.
pub fn psd_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_norm: f64) -> HermitianMatrix {
    let v = unitary_with(rng, dim);
    let norm = max_norm * rng.random::<f64>();
    let lead = rng.random_range(0..dim);
    let values: Vec<f64> = (0..dim)
        .map(|i| if i == lead { norm } else { norm * rng.random::<f64>() })
        .collect();
    crate::hpd::assemble(&v, &values)
}

/// Hermitian matrix with operator norm exactly `norm` (up to rounding).
pub fn hermitian_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, norm: f64) -> Result<HermitianMatrix> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let h = HermitianMatrix::hermitize(&g + g.adjoint());
    let current = h.operator_norm()?;
    if current == 0.0 {
        return Ok(h);
    }
    Ok(h.scale(norm / current))
}

pub fn random_hpd(spec: &SamplerSpec) -> Result<HpdMatrix> {
    spec.validate()?;
    let (lo, hi) = spec.spectrum_range;
    hpd_with(&mut spec.rng("hpd"), spec.dim, lo, hi)
}

pub fn random_unitary(spec: &SamplerSpec) -> Result<CMatrix> {
    spec.validate()?;
    Ok(unitary_with(&mut spec.rng("unitary"), spec.dim))
}

/// `U diag(σ) V` with singular values log-uniform in the spectrum range.
pub fn random_invertible(spec: &SamplerSpec) -> Result<CMatrix> {
    spec.validate()?;
    let (lo, hi) = spec.spectrum_range;
    let mut rng = spec.rng("invertible");
    let u = unitary_with(&mut rng, spec.dim);
    let v = unitary_with(&mut rng, spec.dim);
    let mut us = u;
    for k in 0..spec.dim {
        let s = log_uniform(&mut rng, lo, hi);
        us.column_mut(k).scale_mut(s);
    }
    Ok(us * v)
}

/// Hermitian matrix with operator norm log-uniform in the spectrum range.
pub fn random_hermitian(spec: &SamplerSpec) -> Result<HermitianMatrix> {
    spec.validate()?;
    let (lo, hi) = spec.spectrum_range;
    let mut rng = spec.rng("hermitian");
    let norm = log_uniform(&mut rng, lo, hi);
    hermitian_with(&mut rng, spec.dim, norm)
}

/// `(A, B, C)` with `B = C A C` and `C = I + P`, `P ⪰ 0` of norm at most
/// `λ_hi − 1`; then `A^{-1} # B = C` and `A ⪯ B` with margin `λ_min(C) − 1`.
pub fn near_ordered_pair_with_factor(spec: &SamplerSpec) -> Result<(HpdMatrix, HpdMatrix, HpdMatrix)> {
    spec.validate()?;
    let (lo, hi) = spec.spectrum_range;
    let mut rng = spec.rng("near-ordered-pair");
    let a = hpd_with(&mut rng, spec.dim, lo, hi)?;
    let p = psd_with(&mut rng, spec.dim, (hi - 1.0).max(0.0));
    let c = HpdMatrix::new(HermitianMatrix::identity(spec.dim).add(&p)?)?;
    let b = HpdMatrix::from_product(c.sandwich(a.matrix()))?;
    Ok((a, b, c))
}

pub fn random_near_ordered_pair(spec: &SamplerSpec) -> Result<(HpdMatrix, HpdMatrix)> {
    near_ordered_pair_with_factor(spec).map(|(a, b, _)| (a, b))
}

/// `B = A + P` with `P ⪰ 0`, `‖P‖_op ≤ λ_hi`.
pub fn random_loewner_pair(spec: &SamplerSpec) -> Result<(HpdMatrix, HpdMatrix)> {
    spec.validate()?;
    let (lo, hi) = spec.spectrum_range;
    let mut rng = spec.rng("loewner-pair");
    let a = hpd_with(&mut rng, spec.dim, lo, hi)?;
    let p = psd_with(&mut rng, spec.dim, hi);
    let b = HpdMatrix::new(a.as_hermitian().add(&p)?)?;
    Ok((a, b))
}

/// `log B = log A + P` with `P ⪰ 0`, `‖P‖_op ≤ log(λ_hi/λ_lo)`.
pub fn random_chaotic_pair(spec: &SamplerSpec) -> Result<(HpdMatrix, HpdMatrix)> {
    spec.validate()?;
    let (lo, hi) = spec.spectrum_range;
    let mut rng = spec.rng("chaotic-pair");
    let a = hpd_with(&mut rng, spec.dim, lo, hi)?;
    let p = psd_with(&mut rng, spec.dim, (hi / lo).ln());
    let b = a.log().add(&p)?.exp()?;
    Ok((a, b))
}

/// Two independent matrices from the spec.
pub fn random_unordered_pair(spec: &SamplerSpec) -> Result<(HpdMatrix, HpdMatrix)> {
    spec.validate()?;
    let (lo, hi) = spec.spectrum_range;
    let mut rng = spec.rng("unordered-pair");
    Ok((
        hpd_with(&mut rng, spec.dim, lo, hi)?,
        hpd_with(&mut rng, spec.dim, lo, hi)?,
    ))
}

/// `n` matrices `U diag(λ^{(j)}) U*` sharing one unitary.
pub fn random_commuting_family(spec: &SamplerSpec, n: usize) -> Result<MatrixTuple> {
    spec.validate()?;
    let (lo, hi) = spec.spectrum_range;
    let mut rng = spec.rng("commuting-family");
    let u = unitary_with(&mut rng, spec.dim);
    let items = (0..n)
        .map(|_| {
            let values: Vec<f64> = (0..spec.dim).map(|_| log_uniform(&mut rng, lo, hi)).collect();
            HpdMatrix::new(crate::hpd::assemble(&u, &values))
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixTuple::new(items)
}

/// `n` independent matrices.
pub fn random_tuple(spec: &SamplerSpec, n: usize) -> Result<MatrixTuple> {
    spec.validate()?;
    let (lo, hi) = spec.spectrum_range;
    let mut rng = spec.rng("tuple");
    let items = (0..n)
        .map(|_| hpd_with(&mut rng, spec.dim, lo, hi))
        .collect::<Result<Vec<_>>>()?;
    MatrixTuple::new(items)
}

/// Weights drawn uniformly from `[0.1, 1]`, then normalized.
pub fn random_weights(spec: &SamplerSpec, n: usize) -> Result<WeightVector> {
    let mut rng = spec.rng("weights");
    WeightVector::new((0..n).map(|_| rng.random_range(0.1..=1.0)).collect())
}

/// `n` exponential curves whose generators have operator norms uniform in
/// `[norm_lo, norm_hi]`.
pub fn random_curves(spec: &SamplerSpec, n: usize, norm_lo: f64, norm_hi: f64) -> Result<Vec<Curve>> {
    spec.validate()?;
    let mut rng = spec.rng("curves");
    (0..n)
        .map(|_| {
            let norm = rng.random_range(norm_lo..=norm_hi);
            Ok(Curve::new(hermitian_with(&mut rng, spec.dim, norm)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{loewner_cmp, near_order_cmp, ToleranceProfile};

    fn spec(seed: u64) -> SamplerSpec {
        SamplerSpec::new(seed, 4, (0.1, 10.0), 1).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(SamplerSpec::new(1, 0, (1.0, 2.0), 1).is_err());
        assert!(SamplerSpec::new(1, 17, (1.0, 2.0), 1).is_err());
        assert!(SamplerSpec::new(1, 2, (0.0, 2.0), 1).is_err());
        assert!(SamplerSpec::new(1, 2, (3.0, 2.0), 1).is_err());
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        assert_eq!(random_hpd(&spec(7)).unwrap(), random_hpd(&spec(7)).unwrap());
        assert_ne!(random_hpd(&spec(7)).unwrap(), random_hpd(&spec(8)).unwrap());
        assert_ne!(spec(7).for_trial(0).seed, spec(7).for_trial(1).seed);
    }

    #[test]
    fn unit_spectrum_gives_identity() {
        let s = SamplerSpec::new(3, 5, (1.0, 1.0), 1).unwrap();
        let a = random_hpd(&s).unwrap();
        assert!(a.as_hermitian().max_abs_diff(&HermitianMatrix::identity(5)) < 1e-14);
    }

    #[test]
    fn spectrum_in_range() {
        for seed in 0..20 {
            let a = random_hpd(&spec(seed)).unwrap();
            assert!(a.min_eigenvalue() >= 0.1 * (1.0 - 1e-12));
            assert!(a.max_eigenvalue() <= 10.0 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(&spec(11)).unwrap();
        let err = (u.adjoint() * &u - CMatrix::identity(4, 4)).norm();
        assert!(err < 1e-13);
    }

    #[test]
    fn near_ordered_margin_matches_factor() {
        let tol = ToleranceProfile::default();
        for seed in 0..20 {
            let (a, b, c) = near_ordered_pair_with_factor(&spec(seed)).unwrap();
            let v = near_order_cmp(&a, &b, &tol).unwrap();
            assert!(v.holds);
            assert!((v.margin - (c.min_eigenvalue() - 1.0)).abs() < 1e-8, "{v:?}");
        }
    }

    #[test]
    fn loewner_pairs_hold() {
        let tol = ToleranceProfile::default();
        for seed in 0..20 {
            let (a, b) = random_loewner_pair(&spec(seed)).unwrap();
            assert!(loewner_cmp(&a, &b, &tol).unwrap().holds);
        }
    }

    #[test]
    fn zero_perturbation_is_zero() {
        let mut rng = spec(0).rng("x");
        let p = psd_with(&mut rng, 3, 0.0);
        assert_eq!(p, HermitianMatrix::zeros(3));
    }

    #[test]
    fn commuting_family_commutes() {
        let s = spec(5);
        let fam = random_commuting_family(&s, 3).unwrap();
        for x in fam.iter() {
            for y in fam.iter() {
                let c = x.matrix() * y.matrix() - y.matrix() * x.matrix();
                assert!(crate::hpd::spectral_norm(&c).unwrap() <= 1e-12);
            }
        }
        assert_eq!(random_commuting_family(&s, 1).unwrap().len(), 1);
    }

    #[test]
    fn hermitian_norm() {
        let mut rng = spec(2).rng("h");
        let h = hermitian_with(&mut rng, 4, 0.5).unwrap();
        assert!((h.operator_norm().unwrap() - 0.5).abs() < 1e-14);
    }
}
