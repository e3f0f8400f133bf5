//! Mixed-type multiple orthogonal polynomials on the real line, built from the
//! Gauss-Borel factorization of a truncated moment matrix.

pub mod cd;
pub mod combinatorics;
pub mod error;
pub mod factorization;
pub mod fixtures;
pub mod jacobi;
pub mod matrix;
pub mod measures;
pub mod parallel;
pub mod polynomials;
pub mod quadrature;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use parallel::Exec;
pub use scalar::{Float, Rational, Scalar};
