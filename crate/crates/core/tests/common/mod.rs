//! Reference implementations that share no code with the library: Taylor
//! exponentials, Denman–Beavers square roots and nalgebra's Hermitian
//! eigensolver.

#![allow(dead_code)]

use meanlab_core::hpd::CMatrix;
use meanlab_core::sampling::SamplerSpec;
use meanlab_core::{HermitianMatrix, HpdMatrix};
use num_complex::Complex64;

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn spec(seed: u64, dim: usize, lo: f64, hi: f64) -> SamplerSpec {
    SamplerSpec::new(seed, dim, (lo, hi), 1).unwrap()
}

pub fn fro(m: &CMatrix) -> f64 {
    m.norm()
}

/// Exponential by scaling and squaring of a truncated Taylor series.
pub fn exp_taylor(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let norm = fro(m);
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.25 {
        squarings += 1;
    }
    let scaled = m * c(1.0 / 2f64.powi(squarings));
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled * c(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Principal square root by the Denman–Beavers iteration.
pub fn sqrt_db(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut y = m.clone();
    let mut z = CMatrix::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().expect("invertible");
        let zi = z.clone().try_inverse().expect("invertible");
        let y_next = (&y + zi) * c(0.5);
        let z_next = (&z + yi) * c(0.5);
        let delta = fro(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * fro(&y) {
            break;
        }
    }
    y
}

pub fn inv(m: &CMatrix) -> CMatrix {
    m.clone().try_inverse().expect("invertible")
}

/// Ascending eigenvalues from nalgebra's Hermitian eigensolver.
pub fn eigenvalues_ref(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn lambda_min_ref(m: &CMatrix) -> f64 {
    eigenvalues_ref(&((m + m.adjoint()) * c(0.5)))[0]
}

/// `A #_{1/2} B` from the closed form with reference square roots.
pub fn geometric_ref(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let s = sqrt_db(a);
    let si = inv(&s);
    &s * sqrt_db(&(&si * b * &si)) * &s
}

pub fn rel_diff(x: &CMatrix, y: &CMatrix) -> f64 {
    fro(&(x - y)) / fro(y).max(1.0)
}

pub fn hpd(m: CMatrix) -> HpdMatrix {
    HpdMatrix::from_matrix((&m + m.adjoint()) * c(0.5)).unwrap()
}

pub fn herm_rel_diff(x: &HermitianMatrix, y: &HermitianMatrix) -> f64 {
    rel_diff(x.matrix(), y.matrix())
}
