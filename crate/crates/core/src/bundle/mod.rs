//! Lattice principal bundles: base grids and graphs, link variables, curvature,
//! Kaluza–Klein metric blocks and total-space Ricci curvature.

mod base;
pub mod charts;
mod connection;
mod curvature;
mod metric;

pub use base::{BaseEdge, BaseKind, BaseLattice};
pub use charts::ricci_fd_oracle;
pub use connection::{connection_from_flux, DiscreteConnection};
pub use curvature::{
    codifferential_f, plaquette_curvature, plaquette_holonomies, CurvatureField, FieldLocation, NablaF, LOG_GUARD,
};
pub use metric::{kk_metric, relative_min_eigenvalue, ricci_blocks_at, ricci_h, KKMetricField, RicciBlocks};

use thiserror::Error;

use crate::group_rep::GroupError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BundleError {
    #[error("invalid base: {0}")]
    InvalidBase(String),
    #[error("base graph is not connected")]
    Disconnected,
    #[error("operation needs a torus grid base")]
    NotGrid,
    #[error("inconsistent dimensions: {0}")]
    DimensionMismatch(String),
    #[error("plaquette too coarse at site {site} (angle {angle:.6})")]
    PlaquetteTooCoarse { site: usize, angle: f64 },
    #[error("singular metric")]
    SingularMetric,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("connection document: {0}")]
    Document(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}
