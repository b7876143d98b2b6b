//! Finite metric measure spaces with isometric group actions.

mod action;
pub mod io;
mod ops;
mod sections;
mod space;

pub use action::{IsometricAction, PointMap};
pub use ops::{
    check_submetry, check_submetry_map, equivariance_defect, induced_quotient_map, isometry_defect, isometry_defect_parts,
    quotient, vague_gap, InducedQuotient, IsometryDefect, MeasureCheck, SubmetryReport, SubmetryWitness,
};
pub use sections::{
    bump_dimension_bound, cutoff, delta_v, fixed_dimension, section_equivariance_defect, subgroups, BumpSections, DeltaV,
};
pub use space::{FiniteMMSpace, TRIANGLE_TOL};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MmError {
    #[error("invalid metric space: {0}")]
    InvalidMetric(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("action needs a finite multiplication table")]
    NoTable,
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("section does not select one point per orbit")]
    InvalidSection,
    #[error("induced map defect {defect} exceeds {bound}")]
    BoundViolated { defect: f64, bound: f64 },
    #[error("orbits not 4δ-separated")]
    NotSeparated,
    #[error("vector at point {0} is not fixed by its stabilizer")]
    NotFixed(usize),
    #[error("sections have rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("document: {0}")]
    Document(String),
}
