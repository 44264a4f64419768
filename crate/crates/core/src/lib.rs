//! Operator means, distances and order relations on Hermitian positive
//! definite matrices.
//!
//! * [`hpd`]: Hermitian and positive definite matrix types, a Jacobi
//!   eigensolver and spectral functions.
//! * [`pair`]: two-variable means (metric and spectral geometric,
//!   Wasserstein, fidelity) and distances.
//! * [`order`]: Loewner, chaotic, near-order, eigenvalue and
//!   log-majorization relations with signed margins.
//! * [`multi`]: quasi-arithmetic, log-Euclidean, Rényi power, Karcher and
//!   barycentric means of tuples.
//! * [`asymptotics`]: numerical limit studies.
//! * [`sampling`]: seeded instance generators.

pub mod asymptotics;
pub mod error;
pub mod hpd;
pub mod multi;
pub mod order;
pub mod pair;
pub mod sampling;

pub use error::{Error, Result};
pub use hpd::{CMatrix, HermitianMatrix, HpdMatrix};
