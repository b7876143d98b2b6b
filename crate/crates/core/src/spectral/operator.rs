//! Measure-weighted symmetric operators: stiffness K and diagonal mass M.

use nalgebra::DMatrix;

use super::SpectralError;
use crate::bundle::{BaseLattice, DiscreteConnection};
use crate::group_rep::{GroupKind, RepKind, RepresentationModel};
use crate::linalg::CsrMatrix;

/// What an operator acts on.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Scalar functions on the base vertices.
    Base,
    /// Sections of an associated bundle with fiber dimension `dim`.
    Sections { rep: String, dim: usize },
    /// Functions on a finite principal bundle (base × group).
    Total { group_order: usize },
    /// G-equivariant V-valued functions on a bundle.
    Isotypic { rep: String, dim: usize },
    Other(String),
}

/// The eigenproblem K v = λ M v; the quadratic form is E(u) = uᵀKu and the
/// norm ‖u‖² = uᵀMu.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator {
    matrix: CsrMatrix,
    mass: Vec<f64>,
    domain: Domain,
}

impl SymmetricOperator {
    pub fn new(matrix: CsrMatrix, mass: Vec<f64>, domain: Domain) -> Result<Self, SpectralError> {
        if mass.len() != matrix.dim() {
            return Err(SpectralError::DimensionMismatch(format!("{} weights for dimension {}", mass.len(), matrix.dim())));
        }
        if mass.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(SpectralError::DimensionMismatch("mass weights must be positive".into()));
        }
        if matrix.symmetry_defect() != 0.0 {
            return Err(SpectralError::NotSymmetric(matrix.symmetry_defect()));
        }
        Ok(Self { matrix, mass, domain })
    }

    /// Unit mass.
    pub fn from_matrix(matrix: CsrMatrix, domain: Domain) -> Result<Self, SpectralError> {
        let n = matrix.dim();
        Self::new(matrix, vec![1.0; n], domain)
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: CsrMatrix::identity(n), mass: vec![1.0; n], domain: Domain::Other("identity".into()) }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let t: Vec<_> = d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self { matrix: CsrMatrix::from_triplets(d.len(), &t), mass: vec![1.0; d.len()], domain: Domain::Other("diagonal".into()) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// M^{-1/2} K M^{-1/2}, exactly symmetric.
    pub fn normalized(&self) -> CsrMatrix {
        if self.mass.iter().all(|&m| m == 1.0) {
            return self.matrix.clone();
        }
        let d: Vec<f64> = self.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        self.matrix.scale_symmetric(&d)
    }

    /// E(u) = uᵀKu.
    pub fn form(&self, u: &[f64]) -> f64 {
        let ku = self.matrix.mul_vec(u);
        u.iter().zip(&ku).map(|(a, b)| a * b).sum()
    }

    /// ‖u‖² = uᵀMu.
    pub fn norm_sq(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.mass).map(|(a, m)| m * a * a).sum()
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.mass).map(|((a, b), m)| m * a * b).sum()
    }

    /// max |K[uγ, vγ] − K[u, v]| and mass defect for a point permutation
    /// acting on blocks of `block` consecutive indices.
    pub fn commutation_defect(&self, perms: &[Vec<usize>], block: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for p in perms {
            let map = |i: usize| p[i / block] * block + i % block;
            for i in 0..self.dim() {
                worst = worst.max((self.mass[map(i)] - self.mass[i]).abs());
                for (j, v) in self.matrix.row(i) {
                    worst = worst.max((self.matrix.get(map(i), map(j)) - v).abs());
                }
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.matrix.to_dense()
    }
}

/// Weighted graph Laplacian of the base; on a torus grid this is the
/// five-point stencil (2n+1 in n dimensions) divided by the squared spacing.
pub fn base_laplacian(base: &BaseLattice) -> SymmetricOperator {
    let mut t = Vec::with_capacity(4 * base.edges().len());
    for e in base.edges() {
        t.push((e.from, e.from, e.weight));
        t.push((e.to, e.to, e.weight));
        t.push((e.from, e.to, -e.weight));
        t.push((e.to, e.from, -e.weight));
    }
    let matrix = CsrMatrix::from_triplets(base.n_vertices(), &t);
    SymmetricOperator { matrix, mass: base.vertex_mass().to_vec(), domain: Domain::Base }
}

fn rep_fits(rep: &RepresentationModel, kind: GroupKind, order: usize) -> bool {
    match (rep.kind(), kind) {
        (RepKind::Trivial, _) => true,
        (RepKind::Matrices(ms), GroupKind::Finite) => ms.len() == order,
        (RepKind::U1Weight(_), GroupKind::U1) => true,
        (RepKind::Su2Adjoint | RepKind::Su2SpinHalf, GroupKind::Su2) => true,
        _ => false,
    }
}

/// Σ_e w_e |s_x − ρ(U_xy) s_y|² as a block operator; index `x·dim V + a`.
pub fn connection_laplacian(conn: &DiscreteConnection, rep: &RepresentationModel) -> Result<SymmetricOperator, SpectralError> {
    let group = conn.group();
    if !rep_fits(rep, group.kind(), group.len()) {
        return Err(SpectralError::DimensionMismatch(format!("representation {} does not act on this group", rep.name())));
    }
    let base = conn.base();
    let d = rep.dim();
    let mut t = Vec::with_capacity(4 * d * d * base.edges().len());
    for (e, edge) in base.edges().iter().enumerate() {
        let r = rep.rho(&conn.link(e));
        if (r.transpose() * &r - DMatrix::identity(d, d)).amax() > 1e-10 {
            return Err(SpectralError::NotOrthogonal(e));
        }
        let (x, y, w) = (edge.from, edge.to, edge.weight);
        for a in 0..d {
            t.push((x * d + a, x * d + a, w));
            t.push((y * d + a, y * d + a, w));
            for b in 0..d {
                let v = w * r[(a, b)];
                if v != 0.0 {
                    t.push((x * d + a, y * d + b, -v));
                    t.push((y * d + b, x * d + a, -v));
                }
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(base.n_vertices() * d, &t);
    let mass = base.vertex_mass().iter().flat_map(|&m| std::iter::repeat(m).take(d)).collect();
    Ok(SymmetricOperator { matrix, mass, domain: Domain::Sections { rep: rep.name().to_string(), dim: d } })
}
