//! Sparse storage and direct solvers used by the eigensolver.

mod envelope;
mod sparse;

pub use envelope::{rcm_order, EnvelopeCholesky};
pub use sparse::{symmetrize, CsrMatrix};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {0})")]
    NotPositiveDefinite(usize),
}
