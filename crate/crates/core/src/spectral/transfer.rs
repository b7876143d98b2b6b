//! Transfer maps between discretizations and the convergence probes built on them.

use nalgebra::{DMatrix, DVector};

use super::{connection_laplacian, eigs, Spectrum, SpectralError, SymmetricOperator, CLUSTER_TOL};
use crate::bundle::{codifferential_f, plaquette_curvature, ricci_h, DiscreteConnection};
use crate::group_rep::RepresentationModel;
use crate::mm_space::{IsometricAction, PointMap};

/// Linear map from functions on a target space to functions on a source
/// space, with the source measure for norms. Rows are source points.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMap {
    matrix: DMatrix<f64>,
    source_mass: Vec<f64>,
}

impl TransferMap {
    pub fn new(matrix: DMatrix<f64>, source_mass: Vec<f64>) -> Result<Self, SpectralError> {
        if matrix.nrows() != source_mass.len() {
            return Err(SpectralError::DimensionMismatch("one mass weight per source row".into()));
        }
        Ok(Self { matrix, source_mass })
    }

    /// Φ(f) = f∘φ.
    pub fn from_point_map(phi: &PointMap) -> Self {
        let map: Vec<Option<usize>> = phi.map().iter().map(|&p| Some(p)).collect();
        Self::from_indices(&map, phi.target().n_points(), phi.source().measure().to_vec())
    }

    /// Φ(f)(u) = f(φ(u)), zero where φ is undefined.
    pub fn from_indices(map: &[Option<usize>], n_target: usize, source_mass: Vec<f64>) -> Self {
        let mut m = DMatrix::zeros(map.len(), n_target);
        for (u, p) in map.iter().enumerate() {
            if let Some(p) = p {
                m[(u, *p)] = 1.0;
            }
        }
        Self { matrix: m, source_mass }
    }

    pub fn identity(mass: Vec<f64>) -> Self {
        let n = mass.len();
        Self { matrix: DMatrix::identity(n, n), source_mass: mass }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn source_mass(&self) -> &[f64] {
        &self.source_mass
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(f)).as_slice().to_vec()
    }

    /// Φ ⊗ id_V on V-valued functions (index `u·dim + a`).
    pub fn tensor(&self, dim: usize) -> Self {
        let matrix = self.matrix.kronecker(&DMatrix::identity(dim, dim));
        let source_mass = self.source_mass.iter().flat_map(|&m| std::iter::repeat(m).take(dim)).collect();
        Self { matrix, source_mass }
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        weighted_norm(u, &self.source_mass)
    }
}

pub fn weighted_norm(u: &[f64], mass: &[f64]) -> f64 {
    u.iter().zip(mass).map(|(a, m)| m * a * a).sum::<f64>().sqrt()
}

fn pullback(act: &IsometricAction, g: usize) -> DMatrix<f64> {
    let n = act.n_points();
    let mut m = DMatrix::zeros(n, n);
    for u in 0..n {
        m[(u, act.apply(u, g))] = 1.0;
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct AveragedTransfer {
    pub map: TransferMap,
    /// max over tests of sup_u |Φf(u) − Φ̂f(u)|.
    pub defect: f64,
    /// max_γ max |Φ̂ R_γ^* − R_γ^* Φ̂|.
    pub equivariance: f64,
}

/// Φ̂ = (1/|G|) Σ_γ R_{γ⁻¹}^* Φ R_γ^*, optionally tensored with a representation.
/// The sum is taken before the division, so for 0/1 maps Φ̂ is exactly equivariant.
pub fn averaged_transfer(
    phi: &TransferMap,
    source: &IsometricAction,
    target: &IsometricAction,
    rep: Option<&RepresentationModel>,
    tests: &[Vec<f64>],
) -> Result<AveragedTransfer, SpectralError> {
    let group = source.group();
    if target.group().table() != group.table() {
        return Err(SpectralError::DimensionMismatch("actions use different groups".into()));
    }
    if phi.matrix.nrows() != source.n_points() || phi.matrix.ncols() != target.n_points() {
        return Err(SpectralError::DimensionMismatch("transfer does not fit the actions".into()));
    }
    let table = group.table().ok_or(SpectralError::NeedsFiniteGroup)?;
    let mut sum = DMatrix::zeros(phi.matrix.nrows(), phi.matrix.ncols());
    for g in 0..group.len() {
        let ginv = table.inverse(g);
        sum += pullback(source, ginv) * &phi.matrix * pullback(target, g);
    }
    let avg = sum / group.len() as f64;
    let mut equivariance: f64 = 0.0;
    for g in 0..group.len() {
        let d = &avg * pullback(target, g) - pullback(source, g) * &avg;
        equivariance = equivariance.max(d.amax());
    }
    let mut defect: f64 = 0.0;
    for f in tests {
        let fv = DVector::from_column_slice(f);
        defect = defect.max((&phi.matrix * &fv - &avg * &fv).amax());
    }
    let mut map = TransferMap { matrix: avg, source_mass: phi.source_mass.clone() };
    if let Some(r) = rep {
        map = map.tensor(r.dim());
    }
    Ok(AveragedTransfer { map, defect, equivariance })
}

/// For each probe ũ_k the tail sup over i of ‖Φ_i(ũ_k) − u_i‖, the tail being
/// the second half of the available indices.
pub fn strong_convergence_defect(
    sequence: &[Vec<f64>],
    transfers: &[TransferMap],
    probes: &[Vec<f64>],
) -> Result<Vec<f64>, SpectralError> {
    if sequence.len() != transfers.len() {
        return Err(SpectralError::CountMismatch(sequence.len(), transfers.len()));
    }
    let tail = sequence.len() / 2;
    let mut out = Vec::with_capacity(probes.len());
    for p in probes {
        let mut worst: f64 = 0.0;
        for (u, t) in sequence.iter().zip(transfers).skip(tail) {
            let d: Vec<f64> = t.apply(p).iter().zip(u).map(|(a, b)| a - b).collect();
            worst = worst.max(t.norm(&d));
        }
        out.push(worst);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoscoReport {
    /// |E_i(Φ_i u) − E_∞(u)| per test and index.
    pub recovery: Vec<Vec<f64>>,
    /// E_∞(u_∞) − min over the tail of E_i(u_i); nonpositive when the liminf inequality holds.
    pub liminf_margin: Vec<f64>,
}

/// Probe both Mosco items on a family of discrete forms.
pub fn mosco_probe(
    forms: &[SymmetricOperator],
    limit_energy: &dyn Fn(&[f64]) -> f64,
    recovery: &[TransferMap],
    tests: &[Vec<f64>],
    weak_families: &[(Vec<Vec<f64>>, Vec<f64>)],
) -> Result<MoscoReport, SpectralError> {
    if forms.len() != recovery.len() {
        return Err(SpectralError::CountMismatch(forms.len(), recovery.len()));
    }
    let rec = tests
        .iter()
        .map(|u| {
            let e = limit_energy(u);
            forms.iter().zip(recovery).map(|(f, t)| (f.form(&t.apply(u)) - e).abs()).collect()
        })
        .collect();
    let mut liminf_margin = Vec::with_capacity(weak_families.len());
    for (seq, u) in weak_families {
        if seq.len() != forms.len() {
            return Err(SpectralError::CountMismatch(seq.len(), forms.len()));
        }
        let tail = seq.len() / 2;
        let m = forms.iter().zip(seq).skip(tail).map(|(f, v)| f.form(v)).fold(f64::INFINITY, f64::min);
        liminf_margin.push(limit_energy(u) - m);
    }
    Ok(MoscoReport { recovery: rec, liminf_margin })
}

fn m_orthonormal(cols: Vec<DVector<f64>>, mass: &[f64]) -> Vec<DVector<f64>> {
    let ip = |a: &DVector<f64>, b: &DVector<f64>| a.iter().zip(b.iter()).zip(mass).map(|((x, y), m)| m * x * y).sum::<f64>();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for mut v in cols {
        for _ in 0..2 {
            for q in &out {
                let c = ip(q, &v);
                v.axpy(-c, q, 1.0);
            }
        }
        let n = ip(&v, &v).sqrt();
        if n > 1e-12 {
            out.push(v / n);
        }
    }
    out
}

/// sin of the largest principal angle between span(a) and span(b) in the
/// M-inner product; 1 if either span is degenerate or the dimensions differ.
pub fn subspace_angle(a: &[DVector<f64>], b: &[DVector<f64>], mass: &[f64]) -> f64 {
    let qa = m_orthonormal(a.to_vec(), mass);
    let qb = m_orthonormal(b.to_vec(), mass);
    if qa.is_empty() || qa.len() != qb.len() {
        return 1.0;
    }
    let mut c = DMatrix::<f64>::zeros(qa.len(), qb.len());
    for (i, x) in qa.iter().enumerate() {
        for (j, y) in qb.iter().enumerate() {
            c[(i, j)] = x.iter().zip(y.iter()).zip(mass).map(|((p, q), m)| m * p * q).sum();
        }
    }
    let smin = c.singular_values().iter().copied().fold(f64::INFINITY, f64::min).min(1.0);
    (1.0 - smin * smin).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityRow {
    pub i: usize,
    /// 1-based eigenvalue index.
    pub j: usize,
    pub lambda: f64,
    pub limit: f64,
    pub gap: f64,
    /// Principal-angle sine between Φ_i(limit eigenspace) and the i-th eigenspace.
    pub angle: f64,
}

/// λ_{i,j} against λ_{∞,j} for j ≤ j_max, with eigenspaces compared per
/// degeneracy cluster of the limit.
pub fn eigen_continuity(
    sequence: &[SymmetricOperator],
    limit: &SymmetricOperator,
    transfers: &[TransferMap],
    j_max: usize,
) -> Result<Vec<ContinuityRow>, SpectralError> {
    if sequence.len() != transfers.len() {
        return Err(SpectralError::CountMismatch(sequence.len(), transfers.len()));
    }
    let lim = eigs(limit, limit.dim().min(j_max + 8))?;
    let clusters = lim.clusters(CLUSTER_TOL);
    let mut rows = Vec::new();
    for (i, (op, t)) in sequence.iter().zip(transfers).enumerate() {
        let sp = eigs(op, op.dim().min(j_max + 8))?;
        let (lv, sv) = (lim.vectors.as_ref().expect("vectors"), sp.vectors.as_ref().expect("vectors"));
        for c in clusters.iter().filter(|c| c.start < j_max) {
            if c.start + c.multiplicity > sp.len() || c.start + c.multiplicity > lim.len() {
                break;
            }
            let range = c.start..c.start + c.multiplicity;
            let moved: Vec<DVector<f64>> = range.clone().map(|j| DVector::from_vec(t.apply(lv.column(j).as_slice()))).collect();
            let own: Vec<DVector<f64>> = range.clone().map(|j| sv.column(j).into_owned()).collect();
            let angle = subspace_angle(&moved, &own, op.mass());
            for j in range.take_while(|&j| j < j_max) {
                rows.push(ContinuityRow {
                    i,
                    j: j + 1,
                    lambda: sp.values[j],
                    limit: lim.values[j],
                    gap: (sp.values[j] - lim.values[j]).abs(),
                    angle,
                });
            }
        }
    }
    Ok(rows)
}

/// Curvature budget of one family member, when the base is a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParameters {
    pub max_f: Option<f64>,
    pub max_dstar_f: Option<f64>,
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub j: usize,
    pub values: Vec<f64>,
    pub min: f64,
    pub parameters: Vec<BoundParameters>,
}

fn bound_parameters(conn: &DiscreteConnection) -> BoundParameters {
    let none = BoundParameters { max_f: None, max_dstar_f: None, kappa: None };
    let Ok(f) = plaquette_curvature(conn) else { return none };
    let sigma = conn.group().sigma();
    let max_f = Some(f.max_norm(&sigma));
    let max_dstar_f = codifferential_f(conn.base(), &f).ok().map(|d| d.iter().fold(0.0, |m: f64, x| m.max(x.abs())));
    let kappa = ricci_h(conn.base(), &f, conn.group(), None).ok().map(|r| r.kappa);
    BoundParameters { max_f, max_dstar_f, kappa }
}

/// min over the family of λ_j (1-based) of the connection Laplacian.
pub fn lower_bound_probe(family: &[(DiscreteConnection, RepresentationModel)], j: usize) -> Result<LowerBoundReport, SpectralError> {
    if j == 0 {
        return Err(SpectralError::DimensionMismatch("eigenvalue index is 1-based".into()));
    }
    let mut values = Vec::with_capacity(family.len());
    let mut parameters = Vec::with_capacity(family.len());
    for (conn, rep) in family {
        let op = connection_laplacian(conn, rep)?;
        let s: Spectrum = eigs(&op, j)?;
        values.push(s.values[j - 1]);
        parameters.push(bound_parameters(conn));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(LowerBoundReport { j, values, min, parameters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::BaseLattice;
    use crate::group_rep::{CompactGroupModel, GroupElement};
    use crate::mm_space::FiniteMMSpace;
    use crate::spectral::base_laplacian;
    use std::f64::consts::PI;

    #[test]
    fn equivariant_map_is_unchanged() {
        let z4 = CompactGroupModel::cyclic(4);
        let act = IsometricAction::regular(z4).unwrap();
        let phi = TransferMap::identity(vec![1.0; 4]);
        let a = averaged_transfer(&phi, &act, &act, None, &[vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        assert_eq!(a.map.matrix(), phi.matrix());
        assert_eq!(a.defect, 0.0);
    }

    #[test]
    fn perturbed_map_is_averaged_exactly() {
        let (m, z) = (8, CompactGroupModel::cyclic(4));
        let big = FiniteMMSpace::cycle(m).unwrap();
        let small = FiniteMMSpace::cycle(4).unwrap();
        let src = IsometricAction::new(z.clone(), (0..4).map(|g| (0..m).map(|u| (u + 2 * g) % m).collect()).collect()).unwrap();
        let tgt = IsometricAction::regular(z).unwrap();
        let mut map: Vec<usize> = (0..m).map(|u| u / 2).collect();
        map.swap(0, 3);
        let phi = PointMap::new(big, small.clone(), map).unwrap();
        let eps = crate::mm_space::equivariance_defect(&phi, &src, &tgt).unwrap();
        let tests: Vec<Vec<f64>> = (0..4).map(|p| (0..4).map(|q| small.dist(p, q)).collect()).collect();
        let a = averaged_transfer(&TransferMap::from_point_map(&phi), &src, &tgt, None, &tests).unwrap();
        assert_eq!(a.equivariance, 0.0);
        assert!(a.defect <= eps && eps > 0.0);
    }

    #[test]
    fn nyquist_vectors_do_not_converge_strongly() {
        let mut seq = Vec::new();
        let mut smooth = Vec::new();
        let mut transfers = Vec::new();
        let fine = 256;
        for m in [16usize, 32, 64, 128] {
            let mass = vec![2.0 * PI / m as f64; m];
            // target: the fine circle, sampled by nearest point
            let map: Vec<Option<usize>> = (0..m).map(|u| Some(u * fine / m)).collect();
            transfers.push(TransferMap::from_indices(&map, fine, mass));
            seq.push((0..m).map(|u| if u % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<f64>>());
            smooth.push((0..m).map(|u| (2.0 * PI * u as f64 / m as f64).cos()).collect::<Vec<f64>>());
        }
        let probe: Vec<f64> = (0..fine).map(|u| (2.0 * PI * u as f64 / fine as f64).cos()).collect();
        let good = strong_convergence_defect(&smooth, &transfers, &[probe.clone()]).unwrap();
        let bad = strong_convergence_defect(&seq, &transfers, &[probe]).unwrap();
        assert!(good[0] < 1e-12);
        // oracle: ‖±1 − cos‖² = 2π + π over the circle
        assert!((bad[0] - (3.0 * PI).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn circle_recovery_is_second_order() {
        let mut forms = Vec::new();
        let mut rec = Vec::new();
        let fine = 1024;
        for m in [16usize, 32, 64] {
            let base = BaseLattice::torus_grid(&[m], &[2.0 * PI]).unwrap();
            forms.push(base_laplacian(&base));
            let map: Vec<Option<usize>> = (0..m).map(|u| Some(u * (fine / m))).collect();
            rec.push(TransferMap::from_indices(&map, fine, base.vertex_mass().to_vec()));
        }
        let u: Vec<f64> = (0..fine).map(|p| (2.0 * PI * p as f64 / fine as f64).cos()).collect();
        // oracle: ∫ |d/dx cos x|² = π
        let r = mosco_probe(&forms, &|_| PI, &rec, &[u], &[]).unwrap();
        let d = &r.recovery[0];
        assert!(d[0] / d[1] > 3.9 && d[1] / d[2] > 3.9, "{d:?}");
    }

    #[test]
    fn holonomy_continuity_on_a_cycle() {
        let m = 8;
        let base = BaseLattice::cycle(m).unwrap();
        let u1 = CompactGroupModel::u1(8, 1.0).unwrap();
        let rep = RepresentationModel::u1_weight(1);
        let conn = |a: f64| {
            let mut links = vec![GroupElement::Angle(0.0); m];
            links[0] = GroupElement::Angle(a);
            connection_laplacian(&DiscreteConnection::new(base.clone(), u1.clone(), links).unwrap(), &rep).unwrap()
        };
        let alpha = 0.4;
        let seq: Vec<_> = (1..6).map(|i| conn(alpha + 0.5f64.powi(i))).collect();
        let t: Vec<_> = seq.iter().map(|_| TransferMap::identity(vec![1.0; 2 * m])).collect();
        let rows = eigen_continuity(&seq, &conn(alpha), &t, 4).unwrap();
        for r in &rows {
            assert!(r.gap <= 0.5f64.powi(r.i as i32 + 1) * 1.0 + 1e-12);
        }
        assert_eq!(lower_bound_probe(&[], 1).unwrap().min, f64::INFINITY);
    }
}
