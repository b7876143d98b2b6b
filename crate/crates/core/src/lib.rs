//! Spectral workbench for connections on principal bundles over finite and lattice bases.

pub mod group_rep;
pub mod linalg;
pub mod bundle;
pub mod mm_space;
pub mod spectral;
pub mod holomorphic;
pub mod scenario;
