//! Certified lower and upper bounds on the structured singular value of
//! complex matrices.
//!
//! The crate is organised around a handful of small modules:
//!
//! * [`matnum`] — dense complex matrix arithmetic and the spectral kernels
//!   (spectral norm, spectral radius, eigenvalues, singular values) that
//!   everything else builds on.
//! * [`blockstruct`] — block-diagonal perturbation structures, their unitary
//!   members and their positive scaling sets.
//! * [`mu`] — the bound computations themselves: a multistart lower-bound
//!   ascent, a convex scaling descent for the upper bound, a brute-force
//!   grid oracle for small all-scalar structures, and extraction of a
//!   destabilizing perturbation certificate.
//! * [`stochastic`] — row/column-sum analysis of generalized stochastic
//!   matrices and the exact-value oracles available on that class.
//! * [`constructors`] — builders for the matrix families with known exact
//!   structured singular values (circulants, doubly stochastic combinations,
//!   phase-twisted cone members).
//! * [`cli`] — file formats, analysis reports and the command implementations
//!   behind the `mukit` binary, including the golden verification suite in
//!   [`verify`].
//!
//! All randomness is seeded and deterministic; parallel and sequential runs
//! report identical values (enable/disable the `parallel` feature to switch).

pub mod blockstruct;
pub mod cli;
pub mod constructors;
pub mod exec;
pub mod matnum;
pub mod mu;
pub mod rng;
pub mod stochastic;
pub mod verify;

pub use matnum::{Complex64, ComplexMatrix};

/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),
    #[error("complexity limit exceeded: {0}")]
    Complexity(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("matrix is not in the required class: {0}")]
    NotInClass(String),
    #[error("block structure hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
