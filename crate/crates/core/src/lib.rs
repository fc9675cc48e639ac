//! Spectral theory of periodic Jacobi operators with matrix-valued
//! coefficients.
//!
//! The crate computes monodromy matrices, Floquet fibers and their band
//! structure for p-periodic operators with `m x m` blocks, verifies the
//! trace and determinant identities tying the two pictures together, and
//! turns the uniqueness criteria for the free operator into executable
//! detectors. A standalone Chebyshev module solves the constrained
//! sum-of-squares extremal problem with an independent randomized oracle.
//!
//! All numerics are generic over the real scalar via [`scalar::Scalar`]
//! (`f32` or `f64`); complex matrices are `Matrix<T>` with
//! `num_complex::Complex<T>` entries. The `*64` aliases below are what the
//! CLI and most tests use.

pub mod bands;
pub mod borg;
pub mod chebyshev;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod matrix;
pub mod monodromy;
pub mod operator;
pub mod scalar;
pub mod schema;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use operator::{BlockJacobiOperator, GaugeResult, GeneralBlockJacobi};
pub use scalar::{Scalar, C};

/// f64 concrete aliases (the default precision).
pub type Matrix64 = Matrix<f64>;
pub type C64 = C<f64>;
pub type BlockJacobi64 = BlockJacobiOperator<f64>;
pub type GeneralBlockJacobi64 = GeneralBlockJacobi<f64>;
pub type BandStructure64 = bands::BandStructure<f64>;

/// f32 aliases; useful for size-constrained embeddings, at reduced
/// tolerance.
pub type Matrix32 = Matrix<f32>;
pub type C32 = C<f32>;
pub type BlockJacobi32 = BlockJacobiOperator<f32>;
