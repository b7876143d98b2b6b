//! Laplacians on bases, bundles and covers; spectra and convergence probes.

mod cover;
mod eigs;
mod operator;
mod transfer;

pub use cover::{
    chi_discrete, cover_decomposition, isotypic_basis, isotypic_restriction, total_laplacian, verify_shift,
    voltage_cover, CoverDecomposition, CoverEdge, CoverSpace, SectorReport,
};
pub use eigs::{eigs, eigs_with, Cluster, EigsOptions, SolverMethod, Spectrum, CLUSTER_TOL};
pub use operator::{base_laplacian, connection_laplacian, Domain, SymmetricOperator};
pub use transfer::{
    averaged_transfer, eigen_continuity, lower_bound_probe, mosco_probe, strong_convergence_defect, subspace_angle,
    weighted_norm, AveragedTransfer, BoundParameters, ContinuityRow, LowerBoundReport, MoscoReport, TransferMap,
};

use thiserror::Error;

use crate::bundle::BundleError;
use crate::group_rep::GroupError;
use crate::mm_space::MmError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("inconsistent dimensions: {0}")]
    DimensionMismatch(String),
    #[error("operator is not symmetric (defect {0})")]
    NotSymmetric(f64),
    #[error("link on edge {0} is not orthogonal in the representation")]
    NotOrthogonal(usize),
    #[error("requested {count} eigenpairs of a {dim}-dimensional operator")]
    CountTooLarge { count: usize, dim: usize },
    #[error("eigensolver did not converge after {cycles} cycles (residual {residual:e})")]
    NoConvergence { cycles: usize, residual: f64 },
    #[error("shifted factorization failed: {0}")]
    Factorization(String),
    #[error("spectra have different lengths ({0} vs {1})")]
    CountMismatch(usize, usize),
    #[error("operation needs a finite group")]
    NeedsFiniteGroup,
    #[error("{0}")]
    BadGenerators(String),
    #[error("operator does not commute with the action (defect {0:e})")]
    NotEquivariant(f64),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Mm(#[from] MmError),
}
