//! Compact group models: exact finite groups and quadrature models of U(1), SU(2).

use std::f64::consts::PI;

use nalgebra::{DMatrix, Quaternion};

use super::quadrature::gauss_legendre;
use super::GroupError;

/// Tolerance for the structural identities of Lie data.
pub const LIE_TOL: f64 = 1e-12;

/// A single group element in one of the supported encodings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupElement {
    /// Index into a finite multiplication table.
    Index(usize),
    /// U(1) element `e^{iθ}`, stored as θ reduced to (−π, π].
    Angle(f64),
    /// SU(2) element as a unit quaternion (w, i, j, k).
    Quaternion(Quaternion<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Finite,
    U1,
    Su2,
}

/// Known constructions; used to build the standard real irreps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteFamily {
    Cyclic(usize),
    Dihedral(usize),
    Table,
}

/// Cayley table with identity and inverses.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTable {
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteTable {
    pub fn new(mul: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = mul.len();
        if n == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        for row in &mul {
            if row.len() != n {
                return Err(GroupError::InvalidTable("table is not square".into()));
            }
            if row.iter().any(|&x| x >= n) {
                return Err(GroupError::InvalidTable("entry out of range".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a))
            .ok_or_else(|| GroupError::InvalidTable("no identity element".into()))?;
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| mul[a][b] == identity && mul[b][a] == identity) {
                Some(b) => inverse[a] = b,
                None => return Err(GroupError::InvalidTable(format!("element {a} has no inverse"))),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(GroupError::InvalidTable(format!(
                            "associativity fails on ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(Self { mul, identity, inverse })
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.mul
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    /// Smallest subgroup containing `gens`.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let n = self.order();
        let mut member = vec![false; n];
        member[self.identity] = true;
        let mut list = vec![self.identity];
        let mut i = 0;
        while i < list.len() {
            let a = list[i];
            for &g in gens {
                let b = self.mul[a][g];
                if !member[b] {
                    member[b] = true;
                    list.push(b);
                }
            }
            i += 1;
        }
        list.sort_unstable();
        list
    }

    /// Union of the conjugacy classes of `set` together with their inverses.
    pub fn conjugation_closure(&self, set: &[usize]) -> Vec<usize> {
        let n = self.order();
        let mut member = vec![false; n];
        for &s in set {
            for g in 0..n {
                let c = self.mul[self.mul[self.inverse[g]][s]][g];
                member[c] = true;
                member[self.inverse[c]] = true;
            }
        }
        (0..n).filter(|&a| member[a]).collect()
    }
}

/// Structure constants and invariant metric of the Lie algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct LieData {
    pub labels: Vec<String>,
    /// `c^γ_{αβ}` stored at `(α·k + β)·k + γ`.
    pub structure: Vec<f64>,
    pub sigma: DMatrix<f64>,
}

impl LieData {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn c(&self, alpha: usize, beta: usize, gamma: usize) -> f64 {
        let k = self.dim();
        self.structure[(alpha * k + beta) * k + gamma]
    }

    /// Bracket of coordinate vectors in the basis e_α.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let k = self.dim();
        let mut out = vec![0.0; k];
        for a in 0..k {
            for b in 0..k {
                let xy = x[a] * y[b];
                if xy == 0.0 {
                    continue;
                }
                for (g, o) in out.iter_mut().enumerate() {
                    *o += xy * self.c(a, b, g);
                }
            }
        }
        out
    }

    /// σ([e_α,e_β],[e_δ,e_μ]) etc. via coordinates.
    pub fn sigma_of(&self, x: &[f64], y: &[f64]) -> f64 {
        let k = self.dim();
        let mut s = 0.0;
        for a in 0..k {
            for b in 0..k {
                s += x[a] * self.sigma[(a, b)] * y[b];
            }
        }
        s
    }

    fn basis(&self, a: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.dim()];
        e[a] = 1.0;
        e
    }

    /// Max violation over antisymmetry and the Jacobi identity.
    pub fn structure_defect(&self) -> f64 {
        let k = self.dim();
        let mut defect: f64 = 0.0;
        for a in 0..k {
            for b in 0..k {
                for g in 0..k {
                    defect = defect.max((self.c(a, b, g) + self.c(b, a, g)).abs());
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    let (ea, eb, ec) = (self.basis(a), self.basis(b), self.basis(c));
                    let t1 = self.bracket(&ea, &self.bracket(&eb, &ec));
                    let t2 = self.bracket(&eb, &self.bracket(&ec, &ea));
                    let t3 = self.bracket(&ec, &self.bracket(&ea, &eb));
                    for i in 0..k {
                        defect = defect.max((t1[i] + t2[i] + t3[i]).abs());
                    }
                }
            }
        }
        defect
    }

    /// max |σ([e_γ,e_α],e_β) + σ(e_α,[e_γ,e_β])| over basis triples.
    pub fn ad_invariance_defect(&self) -> f64 {
        let k = self.dim();
        let mut defect: f64 = 0.0;
        for g in 0..k {
            for a in 0..k {
                for b in 0..k {
                    let eg = self.basis(g);
                    let ga = self.bracket(&eg, &self.basis(a));
                    let gb = self.bracket(&eg, &self.basis(b));
                    let v = self.sigma_of(&ga, &self.basis(b)) + self.sigma_of(&self.basis(a), &gb);
                    defect = defect.max(v.abs());
                }
            }
        }
        defect
    }
}

/// A compact group: exact finite group, or a Lie group with Haar quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactGroupModel {
    kind: GroupKind,
    family: FiniteFamily,
    elements: Vec<GroupElement>,
    haar_weights: Vec<f64>,
    table: Option<FiniteTable>,
    lie: Option<LieData>,
    generators: Vec<usize>,
}

fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Reduce an angle to (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

impl CompactGroupModel {
    /// Finite group from an explicit multiplication table.
    pub fn finite(mul: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let table = FiniteTable::new(mul)?;
        let n = table.order();
        let id = table.identity();
        let generators: Vec<usize> = (0..n).filter(|&a| a != id).collect();
        Ok(Self::from_table(table, FiniteFamily::Table, generators))
    }

    fn from_table(table: FiniteTable, family: FiniteFamily, generators: Vec<usize>) -> Self {
        let n = table.order();
        Self {
            kind: GroupKind::Finite,
            family,
            elements: (0..n).map(GroupElement::Index).collect(),
            haar_weights: vec![1.0 / n as f64; n],
            table: Some(table),
            lie: None,
            generators,
        }
    }

    /// Cyclic group Z_m with generating set {1, m−1}.
    pub fn cyclic(m: usize) -> Self {
        assert!(m >= 1);
        let mul = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
        let table = FiniteTable::new(mul).expect("cyclic table is a group");
        let generators = match m {
            1 => vec![],
            2 => vec![1],
            _ => vec![1, m - 1],
        };
        Self::from_table(table, FiniteFamily::Cyclic(m), generators)
    }

    /// Dihedral group of order 2n; element `r^a s^b` has index `a + n·b`.
    ///
    /// The default generating set is the set of all reflections, a union of
    /// conjugacy classes. `dihedral(3)` is S_3.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1);
        let order = 2 * n;
        let mut mul = vec![vec![0; order]; order];
        for x in 0..order {
            let (a, b) = (x % n, x / n);
            for y in 0..order {
                let (c, d) = (y % n, y / n);
                let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                mul[x][y] = rot + n * ((b + d) % 2);
            }
        }
        let table = FiniteTable::new(mul).expect("dihedral table is a group");
        let generators = (n..order).collect();
        Self::from_table(table, FiniteFamily::Dihedral(n), generators)
    }

    /// S_3, realized as the dihedral group of the triangle.
    pub fn symmetric3() -> Self {
        Self::dihedral(3)
    }

    /// U(1) with `nodes` uniform trapezoid nodes and metric σ = (sigma).
    ///
    /// The nodes form the subgroup Z_nodes, so a Cayley table is available;
    /// the rule is exact on Fourier modes |n| < nodes.
    pub fn u1(nodes: usize, sigma: f64) -> Result<Self, GroupError> {
        if nodes == 0 {
            return Err(GroupError::InvalidQuadrature("U(1) needs at least one node".into()));
        }
        let mul = (0..nodes).map(|a| (0..nodes).map(|b| (a + b) % nodes).collect()).collect();
        let table = FiniteTable::new(mul)?;
        let elements = (0..nodes)
            .map(|j| GroupElement::Angle(wrap_angle(2.0 * PI * j as f64 / nodes as f64)))
            .collect();
        let generators = match nodes {
            1 => vec![],
            2 => vec![1],
            _ => vec![1, nodes - 1],
        };
        Ok(Self {
            kind: GroupKind::U1,
            family: FiniteFamily::Cyclic(nodes),
            elements,
            haar_weights: vec![1.0 / nodes as f64; nodes],
            table: Some(table),
            lie: Some(LieData {
                labels: vec!["e1".into()],
                structure: vec![0.0],
                sigma: DMatrix::from_element(1, 1, sigma),
            }),
            generators,
        })
    }

    /// SU(2) with basis e_a = (unit quaternion)_a / 2, so [e_1,e_2] = e_3.
    ///
    /// Product rule on zyz Euler angles: `order + 1` Gauss–Legendre nodes in
    /// cos θ and `2·order + 2` uniform nodes in each of φ, ψ ∈ [0, 4π). Exact
    /// for products of two matrix coefficients of total spin ≤ `order`.
    pub fn su2(order: usize, sigma: DMatrix<f64>) -> Result<Self, GroupError> {
        if sigma.nrows() != 3 || sigma.ncols() != 3 {
            return Err(GroupError::InvalidQuadrature("SU(2) metric must be 3×3".into()));
        }
        let n_theta = order + 1;
        let n_ang = 2 * order + 2;
        let (xs, ws) = gauss_legendre(n_theta);
        let mut elements = Vec::with_capacity(n_theta * n_ang * n_ang);
        let mut weights = Vec::with_capacity(elements.capacity());
        for (x, w) in xs.iter().zip(&ws) {
            let theta = x.acos();
            for i in 0..n_ang {
                let phi = 4.0 * PI * i as f64 / n_ang as f64;
                for j in 0..n_ang {
                    let psi = 4.0 * PI * j as f64 / n_ang as f64;
                    elements.push(GroupElement::Quaternion(euler_zyz(phi, theta, psi)));
                    weights.push(w / (2.0 * (n_ang * n_ang) as f64));
                }
            }
        }
        let mut structure = vec![0.0; 27];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    structure[(a * 3 + b) * 3 + c] = levi_civita(a, b, c);
                }
            }
        }
        Ok(Self {
            kind: GroupKind::Su2,
            family: FiniteFamily::Table,
            elements,
            haar_weights: weights,
            table: None,
            lie: Some(LieData {
                labels: vec!["e1".into(), "e2".into(), "e3".into()],
                structure,
                sigma,
            }),
            generators: vec![],
        })
    }

    /// Same group with the invariant metric replaced.
    pub fn with_sigma(mut self, sigma: DMatrix<f64>) -> Result<Self, GroupError> {
        match self.lie.as_mut() {
            Some(lie) if lie.sigma.shape() == sigma.shape() => {
                lie.sigma = sigma;
                Ok(self)
            }
            Some(_) => Err(GroupError::InvalidQuadrature("metric has the wrong size".into())),
            None => Err(GroupError::NotLie),
        }
    }

    /// Replace the default Cayley generating set (finite table kinds only).
    pub fn with_generators(mut self, gens: Vec<usize>) -> Result<Self, GroupError> {
        let table = self.table.as_ref().ok_or(GroupError::NoTable)?;
        if gens.iter().any(|&g| g >= table.order()) {
            return Err(GroupError::InvalidTable("generator out of range".into()));
        }
        self.generators = gens;
        Ok(self)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn family(&self) -> FiniteFamily {
        self.family
    }

    /// Number of elements (finite) or quadrature nodes (Lie).
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> GroupElement {
        self.elements[i]
    }

    pub fn haar_weights(&self) -> &[f64] {
        &self.haar_weights
    }

    pub fn total_mass(&self) -> f64 {
        self.haar_weights.iter().sum()
    }

    pub fn table(&self) -> Option<&FiniteTable> {
        self.table.as_ref()
    }

    pub fn lie(&self) -> Option<&LieData> {
        self.lie.as_ref()
    }

    pub fn lie_dim(&self) -> usize {
        self.lie.as_ref().map_or(0, |l| l.dim())
    }

    /// σ_{αβ}; a 0×0 matrix for finite groups.
    pub fn sigma(&self) -> DMatrix<f64> {
        self.lie.as_ref().map_or_else(|| DMatrix::zeros(0, 0), |l| l.sigma.clone())
    }

    /// Symmetric, conjugation-closed Cayley generating set.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn is_abelian(&self) -> bool {
        match self.kind {
            GroupKind::Finite => self.table.as_ref().is_some_and(|t| t.is_abelian()),
            GroupKind::U1 => true,
            GroupKind::Su2 => false,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind {
            GroupKind::Finite => GroupElement::Index(self.table.as_ref().unwrap().identity()),
            GroupKind::U1 => GroupElement::Angle(0.0),
            GroupKind::Su2 => GroupElement::Quaternion(Quaternion::new(1.0, 0.0, 0.0, 0.0)),
        }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (a, b) {
            (GroupElement::Index(x), GroupElement::Index(y)) => {
                GroupElement::Index(self.table.as_ref().expect("finite table").mul(*x, *y))
            }
            (GroupElement::Angle(x), GroupElement::Angle(y)) => GroupElement::Angle(wrap_angle(x + y)),
            (GroupElement::Quaternion(x), GroupElement::Quaternion(y)) => {
                GroupElement::Quaternion(x * y)
            }
            _ => panic!("mixed group element encodings"),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        match a {
            GroupElement::Index(x) => GroupElement::Index(self.table.as_ref().expect("finite table").inverse(*x)),
            GroupElement::Angle(x) => GroupElement::Angle(wrap_angle(-x)),
            GroupElement::Quaternion(q) => GroupElement::Quaternion(q.conjugate()),
        }
    }

    /// Exponential of a Lie-algebra vector in the basis e_α.
    pub fn exp(&self, x: &[f64]) -> Result<GroupElement, GroupError> {
        match self.kind {
            GroupKind::Finite => Err(GroupError::NotLie),
            GroupKind::U1 => Ok(GroupElement::Angle(wrap_angle(x[0]))),
            GroupKind::Su2 => Ok(GroupElement::Quaternion(su2_exp(x))),
        }
    }

    /// Principal logarithm together with its angle in [0, π].
    ///
    /// The angle is |θ| for U(1) and arccos(w) for SU(2); the cut locus of
    /// exp sits at angle π in both cases.
    pub fn log(&self, g: &GroupElement) -> Result<(Vec<f64>, f64), GroupError> {
        match g {
            GroupElement::Index(_) => Err(GroupError::NotLie),
            GroupElement::Angle(t) => {
                let t = wrap_angle(*t);
                Ok((vec![t], t.abs()))
            }
            GroupElement::Quaternion(q) => {
                let qn = q.normalize();
                let (w, v) = (qn.w, qn.imag());
                let angle = w.clamp(-1.0, 1.0).acos();
                let vn = v.norm();
                let scale = if vn < 1e-300 { 2.0 } else { 2.0 * angle / vn };
                Ok((vec![scale * v[0], scale * v[1], scale * v[2]], angle))
            }
        }
    }

    /// Metric volume μ_σ(G) of the Lie group; `None` for finite groups.
    pub fn lie_volume(&self) -> Option<f64> {
        let lie = self.lie.as_ref()?;
        let det = lie.sigma.determinant();
        match self.kind {
            GroupKind::U1 => Some(2.0 * PI * det.sqrt()),
            // e_a = unit/2 makes (SU(2), δ) the round 3-sphere of radius 2
            GroupKind::Su2 => Some(16.0 * PI * PI * det.sqrt()),
            GroupKind::Finite => None,
        }
    }

    /// Max over antisymmetry and Jacobi violations.
    pub fn lie_structure_defect(&self) -> Result<f64, GroupError> {
        self.lie.as_ref().map(LieData::structure_defect).ok_or(GroupError::NotLie)
    }

    /// Index of `g` among the elements, for table kinds.
    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        match g {
            GroupElement::Index(i) => Some(*i),
            GroupElement::Angle(t) => {
                let m = self.elements.len() as f64;
                let j = (t.rem_euclid(2.0 * PI) * m / (2.0 * PI)).round();
                let idx = (j as usize) % self.elements.len();
                if let GroupElement::Angle(node) = self.elements[idx] {
                    if (wrap_angle(node - t)).abs() < 1e-9 {
                        return Some(idx);
                    }
                }
                None
            }
            GroupElement::Quaternion(_) => None,
        }
    }
}

/// exp(Σ x_a e_a) with e_a = unit_a / 2.
pub fn su2_exp(x: &[f64]) -> Quaternion<f64> {
    let t = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if t < 1e-300 {
        return Quaternion::new(1.0, 0.0, 0.0, 0.0);
    }
    let s = (t / 2.0).sin() / t;
    Quaternion::new((t / 2.0).cos(), s * x[0], s * x[1], s * x[2])
}

/// exp(φ e_3) exp(θ e_2) exp(ψ e_3).
pub fn euler_zyz(phi: f64, theta: f64, psi: f64) -> Quaternion<f64> {
    su2_exp(&[0.0, 0.0, phi]) * su2_exp(&[0.0, theta, 0.0]) * su2_exp(&[0.0, 0.0, psi])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_three_is_nonabelian_of_order_six() {
        let g = CompactGroupModel::symmetric3();
        assert_eq!(g.len(), 6);
        assert!(!g.is_abelian());
        let t = g.table().unwrap();
        let closure = t.conjugation_closure(g.generators());
        assert_eq!(closure, g.generators().to_vec());
        assert_eq!(t.generated_subgroup(g.generators()).len(), 6);
    }

    #[test]
    fn cyclic_generators_generate() {
        for m in 1..8 {
            let g = CompactGroupModel::cyclic(m);
            let t = g.table().unwrap();
            assert_eq!(t.generated_subgroup(g.generators()).len(), m);
        }
    }

    #[test]
    fn bad_table_rejected() {
        assert!(CompactGroupModel::finite(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(CompactGroupModel::finite(vec![vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn su2_structure_and_weights() {
        let g = CompactGroupModel::su2(3, DMatrix::identity(3, 3)).unwrap();
        assert!(g.lie_structure_defect().unwrap() < LIE_TOL);
        assert!((g.total_mass() - 1.0).abs() < 1e-12);
        // exp/log round trip away from the cut locus
        let x = [0.3, -0.2, 0.9];
        let q = g.exp(&x).unwrap();
        let (back, angle) = g.log(&q).unwrap();
        for i in 0..3 {
            assert!((back[i] - x[i]).abs() < 1e-12);
        }
        assert!(angle < PI);
    }

    #[test]
    fn su2_bracket_matches_quaternion_commutator() {
        let i = Quaternion::new(0.0f64, 0.5, 0.0, 0.0);
        let j = Quaternion::new(0.0, 0.0, 0.5, 0.0);
        let c = i * j - j * i;
        assert!((c.k - 0.5).abs() < 1e-15);
    }

    #[test]
    fn u1_node_lookup() {
        let g = CompactGroupModel::u1(12, 1.0).unwrap();
        for (i, e) in g.elements().iter().enumerate() {
            assert_eq!(g.index_of(e), Some(i));
        }
        assert_eq!(g.index_of(&GroupElement::Angle(0.1)), None);
    }
}
