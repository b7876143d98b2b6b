//! Real orthogonal representations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, UnitQuaternion};

use super::group::{CompactGroupModel, FiniteFamily, GroupElement, GroupKind};
use super::GroupError;

const ORTHO_TOL: f64 = 1e-12;
const HOM_TOL_FINITE: f64 = 1e-12;
const HOM_TOL_LIE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum RepKind {
    /// One matrix per element index of a finite group.
    Matrices(Vec<DMatrix<f64>>),
    /// U(1) acting on R² by rotation through nθ.
    U1Weight(i64),
    /// SU(2) acting on its Lie algebra by Ad.
    Su2Adjoint,
    /// SU(2) acting on the quaternions R⁴ by left multiplication.
    Su2SpinHalf,
    Trivial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationModel {
    name: String,
    dim: usize,
    kind: RepKind,
    rho_star: Vec<DMatrix<f64>>,
    irreducible: bool,
}

fn rotation2(t: f64) -> DMatrix<f64> {
    let (s, c) = t.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

fn quaternion_left(w: f64, x: f64, y: f64, z: f64) -> DMatrix<f64> {
    // coordinates (w, i, j, k)
    DMatrix::from_row_slice(
        4,
        4,
        &[w, -x, -y, -z, x, w, -z, y, y, z, w, -x, z, -y, x, w],
    )
}

impl RepresentationModel {
    /// Finite-group representation from one matrix per element.
    pub fn from_matrices(
        name: impl Into<String>,
        matrices: Vec<DMatrix<f64>>,
        irreducible: bool,
    ) -> Result<Self, GroupError> {
        let dim = matrices.first().map(|m| m.nrows()).ok_or(GroupError::EmptySamples)?;
        if matrices.iter().any(|m| m.nrows() != dim || m.ncols() != dim) || dim == 0 {
            return Err(GroupError::DimensionMismatch("representation matrices differ in size".into()));
        }
        Ok(Self { name: name.into(), dim, kind: RepKind::Matrices(matrices), rho_star: vec![], irreducible })
    }

    /// ρ_n of U(1) on R²; ρ_*(e_1) = nJ.
    pub fn u1_weight(n: i64) -> Self {
        let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        Self {
            name: format!("rho_{n}"),
            dim: 2,
            kind: RepKind::U1Weight(n),
            rho_star: vec![j * n as f64],
            irreducible: n != 0,
        }
    }

    /// Trivial representation on R^dim; `lie_dim` zero generators.
    pub fn trivial(dim: usize, lie_dim: usize) -> Self {
        Self {
            name: "trivial".into(),
            dim,
            kind: RepKind::Trivial,
            rho_star: vec![DMatrix::zeros(dim, dim); lie_dim],
            irreducible: dim == 1,
        }
    }

    /// Ad of SU(2) on R³; ρ_*(e_a)_{bc} = −ε_{abc}.
    pub fn su2_adjoint() -> Self {
        let mut gens = vec![DMatrix::zeros(3, 3); 3];
        for (a, g) in gens.iter_mut().enumerate() {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            g[(b, c)] = -1.0;
            g[(c, b)] = 1.0;
        }
        Self { name: "adjoint".into(), dim: 3, kind: RepKind::Su2Adjoint, rho_star: gens, irreducible: true }
    }

    /// Left multiplication on R⁴ ≅ H. Scalar Casimir 3/4 with quaternionic commutant.
    pub fn su2_spin_half() -> Self {
        let gens = vec![
            quaternion_left(0.0, 0.5, 0.0, 0.0),
            quaternion_left(0.0, 0.0, 0.5, 0.0),
            quaternion_left(0.0, 0.0, 0.0, 0.5),
        ];
        Self { name: "spin_half".into(), dim: 4, kind: RepKind::Su2SpinHalf, rho_star: gens, irreducible: true }
    }

    /// Rotation rep of Z_m by 2πn/m on R²; cos/sin signs for n ≡ 0 or m/2.
    pub fn cyclic_rotation(m: usize, n: usize) -> Self {
        let mats = (0..m).map(|j| rotation2(2.0 * PI * (n * j) as f64 / m as f64)).collect();
        let irreducible = 2 * (n % m) != m && n % m != 0;
        Self { name: format!("rot_{n}"), dim: 2, kind: RepKind::Matrices(mats), rho_star: vec![], irreducible }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_irreducible(mut self, flag: bool) -> Self {
        self.irreducible = flag;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &RepKind {
        &self.kind
    }

    pub fn irreducible(&self) -> bool {
        self.irreducible
    }

    /// ρ_*(e_α); empty for finite groups.
    pub fn rho_star(&self) -> &[DMatrix<f64>] {
        &self.rho_star
    }

    pub fn is_trivial(&self) -> bool {
        match &self.kind {
            RepKind::Trivial => true,
            RepKind::U1Weight(n) => *n == 0,
            RepKind::Matrices(ms) => ms.iter().all(|m| (m - DMatrix::identity(self.dim, self.dim)).amax() < ORTHO_TOL),
            _ => false,
        }
    }

    /// ρ(g). Panics if the element encoding does not fit the representation.
    pub fn rho(&self, g: &GroupElement) -> DMatrix<f64> {
        match (&self.kind, g) {
            (RepKind::Trivial, _) => DMatrix::identity(self.dim, self.dim),
            (RepKind::Matrices(ms), GroupElement::Index(i)) => ms[*i].clone(),
            (RepKind::U1Weight(n), GroupElement::Angle(t)) => rotation2(*n as f64 * t),
            (RepKind::Su2Adjoint, GroupElement::Quaternion(q)) => {
                let r = UnitQuaternion::from_quaternion(*q).to_rotation_matrix();
                DMatrix::from_iterator(3, 3, r.matrix().iter().copied())
            }
            (RepKind::Su2SpinHalf, GroupElement::Quaternion(q)) => quaternion_left(q.w, q.i, q.j, q.k),
            (kind, g) => panic!("representation {kind:?} cannot evaluate element {g:?}"),
        }
    }

    /// ρ(γ) for every element of the group, in element order.
    pub fn matrices_on(&self, group: &CompactGroupModel) -> Vec<DMatrix<f64>> {
        group.elements().iter().map(|g| self.rho(g)).collect()
    }

    /// Character value tr ρ(g).
    pub fn character(&self, g: &GroupElement) -> f64 {
        self.rho(g).trace()
    }

    /// Check orthogonality, the homomorphism law, and ρ_* consistency.
    pub fn validate(&self, group: &CompactGroupModel) -> Result<(), GroupError> {
        match (&self.kind, group.kind()) {
            (RepKind::Matrices(ms), GroupKind::Finite) if ms.len() != group.len() => {
                return Err(GroupError::DimensionMismatch(format!(
                    "{} matrices for a group of order {}",
                    ms.len(),
                    group.len()
                )))
            }
            (RepKind::Matrices(_), GroupKind::Finite)
            | (RepKind::Trivial, _)
            | (RepKind::U1Weight(_), GroupKind::U1)
            | (RepKind::Su2Adjoint | RepKind::Su2SpinHalf, GroupKind::Su2) => {}
            (kind, gk) => return Err(GroupError::InvalidRep(format!("{kind:?} does not act on a {gk:?} group"))),
        }
        let id = DMatrix::<f64>::identity(self.dim, self.dim);
        let mats = self.matrices_on(group);
        for (i, m) in mats.iter().enumerate() {
            if (m.transpose() * m - &id).amax() > ORTHO_TOL {
                return Err(GroupError::InvalidRep(format!("ρ(γ_{i}) is not orthogonal")));
            }
        }
        let (tol, sample) = match group.kind() {
            GroupKind::Finite => (HOM_TOL_FINITE, group.len()),
            _ => (HOM_TOL_LIE, group.len().min(48)),
        };
        let stride = (group.len() / sample).max(1);
        for a in (0..group.len()).step_by(stride) {
            for b in (0..group.len()).step_by(stride) {
                let ab = group.multiply(&group.element(a), &group.element(b));
                if (self.rho(&ab) - &mats[a] * &mats[b]).amax() > tol {
                    return Err(GroupError::InvalidRep(format!("homomorphism fails on ({a},{b})")));
                }
            }
        }
        if let Some(lie) = group.lie() {
            if self.rho_star.len() != lie.dim() {
                return Err(GroupError::DimensionMismatch("ρ_* needs one matrix per basis vector".into()));
            }
            for (a, x) in self.rho_star.iter().enumerate() {
                if (x + x.transpose()).amax() > HOM_TOL_LIE {
                    return Err(GroupError::InvalidRep(format!("ρ_*(e_{}) is not antisymmetric", a + 1)));
                }
            }
            let k = lie.dim();
            for a in 0..k {
                for b in 0..k {
                    let comm = &self.rho_star[a] * &self.rho_star[b] - &self.rho_star[b] * &self.rho_star[a];
                    let mut br = DMatrix::zeros(self.dim, self.dim);
                    for g in 0..k {
                        br += &self.rho_star[g] * lie.c(a, b, g);
                    }
                    if (comm - br).amax() > HOM_TOL_LIE {
                        return Err(GroupError::InvalidRep("ρ_* does not preserve brackets".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// dim End_G(V) = ∫ χ(γ)² dμ / μ(G); 1, 2 or 4 for real irreps.
pub fn commutant_dim(group: &CompactGroupModel, rep: &RepresentationModel) -> f64 {
    let total = group.total_mass();
    group
        .elements()
        .iter()
        .zip(group.haar_weights())
        .map(|(g, w)| w * rep.character(g).powi(2))
        .sum::<f64>()
        / total
}

/// Complete list of real irreducible representations for cyclic and dihedral groups.
pub fn real_irreps(group: &CompactGroupModel) -> Result<Vec<RepresentationModel>, GroupError> {
    let one = |name: &str, vals: Vec<f64>| {
        RepresentationModel::from_matrices(name, vals.into_iter().map(|v| DMatrix::from_element(1, 1, v)).collect(), true)
    };
    match (group.kind(), group.family()) {
        (GroupKind::Finite, FiniteFamily::Cyclic(m)) => {
            let mut out = vec![one("trivial", vec![1.0; m])?];
            if m % 2 == 0 {
                out.push(one("sign", (0..m).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect())?);
            }
            for n in 1..m.div_ceil(2) {
                out.push(RepresentationModel::cyclic_rotation(m, n));
            }
            Ok(out)
        }
        (GroupKind::Finite, FiniteFamily::Dihedral(n)) => {
            let order = 2 * n;
            let refl = |x: usize| x >= n;
            let rot = |x: usize| x % n;
            let mut out = vec![
                one("trivial", vec![1.0; order])?,
                one("sign", (0..order).map(|x| if refl(x) { -1.0 } else { 1.0 }).collect())?,
            ];
            if n % 2 == 0 {
                let par = |x: usize| if rot(x) % 2 == 0 { 1.0 } else { -1.0 };
                out.push(one("alt_r", (0..order).map(par).collect())?);
                out.push(one(
                    "alt_rs",
                    (0..order).map(|x| par(x) * if refl(x) { -1.0 } else { 1.0 }).collect(),
                )?);
            }
            for j in 1..n.div_ceil(2) {
                let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
                let mats = (0..order)
                    .map(|x| {
                        let r = rotation2(2.0 * PI * (j * rot(x)) as f64 / n as f64);
                        if refl(x) {
                            r * &s
                        } else {
                            r
                        }
                    })
                    .collect();
                out.push(RepresentationModel::from_matrices(format!("std_{j}"), mats, true)?);
            }
            Ok(out)
        }
        _ => Err(GroupError::InvalidRep("no irreducible catalog for this group".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_reps_are_homomorphisms() {
        for g in [
            CompactGroupModel::cyclic(2),
            CompactGroupModel::cyclic(5),
            CompactGroupModel::cyclic(6),
            CompactGroupModel::dihedral(3),
            CompactGroupModel::dihedral(4),
        ] {
            let reps = real_irreps(&g).unwrap();
            let mut total = 0.0;
            for r in &reps {
                r.validate(&g).unwrap();
                let d = commutant_dim(&g, r);
                total += (r.dim() * r.dim()) as f64 / d;
            }
            assert!((total - g.len() as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn lie_reps_validate() {
        let u1 = CompactGroupModel::u1(16, 1.0).unwrap();
        RepresentationModel::u1_weight(3).validate(&u1).unwrap();
        let su2 = CompactGroupModel::su2(2, DMatrix::identity(3, 3)).unwrap();
        RepresentationModel::su2_adjoint().validate(&su2).unwrap();
        RepresentationModel::su2_spin_half().validate(&su2).unwrap();
        assert!((commutant_dim(&su2, &RepresentationModel::su2_spin_half()) - 4.0).abs() < 1e-10);
        assert!((commutant_dim(&su2, &RepresentationModel::su2_adjoint()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn adjoint_rho_star_is_derivative_of_rho() {
        let su2 = CompactGroupModel::su2(1, DMatrix::identity(3, 3)).unwrap();
        let adj = RepresentationModel::su2_adjoint();
        let h = 1e-6;
        for a in 0..3 {
            let mut x = [0.0; 3];
            x[a] = h;
            let plus = adj.rho(&su2.exp(&x).unwrap());
            x[a] = -h;
            let minus = adj.rho(&su2.exp(&x).unwrap());
            let d = (plus - minus) / (2.0 * h);
            assert!((d - &adj.rho_star()[a]).amax() < 1e-8);
        }
    }

    #[test]
    fn mismatched_rep_rejected() {
        let g = CompactGroupModel::cyclic(3);
        assert!(RepresentationModel::su2_adjoint().validate(&g).is_err());
        let bad = RepresentationModel::from_matrices("bad", vec![DMatrix::identity(1, 1) * 2.0; 3], false).unwrap();
        assert!(bad.validate(&g).is_err());
    }
}
