//! Compact groups, their real representations and Casimir invariants.

mod casimir;
mod group;
pub mod json;
pub mod quadrature;
mod rep;

pub use casimir::{
    casimir, check_ad_invariance, haar_average, isotypic_projector, permutation_matrices,
    weighted_mean, CasimirValue, CASIMIR_TOL,
};
pub use group::{
    euler_zyz, su2_exp, wrap_angle, CompactGroupModel, FiniteFamily, FiniteTable, GroupElement,
    GroupKind, LieData, LIE_TOL,
};
pub use rep::{commutant_dim, real_irreps, RepKind, RepresentationModel};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),
    #[error("operation needs a Lie-kind group")]
    NotLie,
    #[error("operation needs a finite multiplication table")]
    NoTable,
    #[error("degenerate metric")]
    DegenerateMetric,
    #[error("not scalar: representation not (absolutely) irreducible or data inconsistent (residual {0:.3e})")]
    NotScalar(f64),
    #[error("inconsistent dimensions: {0}")]
    DimensionMismatch(String),
    #[error("empty sample set")]
    EmptySamples,
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("group document: {0}")]
    Document(String),
}
