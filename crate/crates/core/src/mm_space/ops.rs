//! Quotients, submetry checks and Hausdorff-approximation defects.

use nalgebra::DMatrix;

use super::{FiniteMMSpace, IsometricAction, MmError, PointMap};

/// Orbit space with d̄(ā, b̄) = min over orbit representatives and the
/// pushforward measure; orbits are numbered by their smallest point.
pub fn quotient(space: &FiniteMMSpace, act: &IsometricAction) -> Result<(FiniteMMSpace, PointMap), MmError> {
    act.validate_on(space)?;
    let orbits = act.orbits();
    let q = orbits.len();
    let mut proj = vec![0; space.n_points()];
    for (k, o) in orbits.iter().enumerate() {
        for &u in o {
            proj[u] = k;
        }
    }
    let mut d = DMatrix::zeros(q, q);
    for a in 0..q {
        for b in a + 1..q {
            // isometric action: min over one representative suffices
            let u = orbits[a][0];
            let m = orbits[b].iter().map(|&v| space.dist(u, v)).fold(f64::INFINITY, f64::min);
            d[(a, b)] = m;
            d[(b, a)] = m;
        }
    }
    let measure = orbits.iter().map(|o| o.iter().map(|&u| space.measure()[u]).sum()).collect();
    let qs = FiniteMMSpace::new(d, measure)?;
    let pi = PointMap::new(space.clone(), qs.clone(), proj)?;
    Ok((qs, pi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmetryWitness {
    pub center: usize,
    pub radius: f64,
    /// Quotient point in exactly one of π(D(u, r)) and D(ū, r).
    pub point: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmetryReport {
    pub holds: bool,
    pub witness: Option<SubmetryWitness>,
}

/// π(D(u, r)) = D(π(u), r) for every center and every realized radius.
pub fn check_submetry(space: &FiniteMMSpace, act: &IsometricAction) -> Result<SubmetryReport, MmError> {
    let (_, pi) = quotient(space, act)?;
    Ok(check_submetry_map(&pi))
}

/// Same check for an arbitrary map onto a supplied quotient metric.
pub fn check_submetry_map(pi: &PointMap) -> SubmetryReport {
    let (p, q) = (pi.source(), pi.target());
    for u in 0..p.n_points() {
        let ub = pi.apply(u);
        let mut radii: Vec<f64> = (0..p.n_points())
            .map(|v| p.dist(u, v))
            .chain((0..q.n_points()).map(|x| q.dist(ub, x)))
            .collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        for &r in &radii {
            let mut image = vec![false; q.n_points()];
            for v in p.ball(u, r) {
                image[pi.apply(v)] = true;
            }
            for x in 0..q.n_points() {
                if image[x] != (q.dist(ub, x) <= r) {
                    return SubmetryReport { holds: false, witness: Some(SubmetryWitness { center: u, radius: r, point: x }) };
                }
            }
        }
    }
    SubmetryReport { holds: true, witness: None }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryDefect {
    /// sup |d'(a, b) − d(φa, φb)|.
    pub distortion: f64,
    /// sup over target points of the distance to the image.
    pub covering: f64,
}

impl IsometryDefect {
    pub fn value(&self) -> f64 {
        self.distortion.max(self.covering)
    }
}

pub fn isometry_defect_parts(phi: &PointMap) -> IsometryDefect {
    let (s, t) = (phi.source(), phi.target());
    let mut distortion: f64 = 0.0;
    for a in 0..s.n_points() {
        for b in a + 1..s.n_points() {
            distortion = distortion.max((s.dist(a, b) - t.dist(phi.apply(a), phi.apply(b))).abs());
        }
    }
    let covering = (0..t.n_points())
        .map(|p| t.dist_to_set(p, phi.map()))
        .fold(0.0, f64::max);
    IsometryDefect { distortion, covering }
}

/// φ is an ε-isometry for every ε strictly above this value.
pub fn isometry_defect(phi: &PointMap) -> f64 {
    isometry_defect_parts(phi).value()
}

/// sup over (u, γ) of d(φ(uγ), φ(u)γ).
pub fn equivariance_defect(phi: &PointMap, source: &IsometricAction, target: &IsometricAction) -> Result<f64, MmError> {
    if source.group().len() != target.group().len() || source.group().table() != target.group().table() {
        return Err(MmError::InvalidAction("source and target actions use different groups".into()));
    }
    if source.n_points() != phi.source().n_points() || target.n_points() != phi.target().n_points() {
        return Err(MmError::InvalidAction("actions do not match the map's spaces".into()));
    }
    let t = phi.target();
    let mut worst: f64 = 0.0;
    for g in 0..source.group().len() {
        for u in 0..source.n_points() {
            worst = worst.max(t.dist(phi.apply(source.apply(u, g)), target.apply(phi.apply(u), g)));
        }
    }
    Ok(worst)
}

/// Both sides of the pushforward estimate for one test function on P/G.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureCheck {
    /// |∫ f d(φ̄_*ν̄') − ∫ f dν̄|.
    pub lhs: f64,
    /// ν'(P')·sup|f∘φ̄∘π' − f∘π∘φ| + |∫ f∘π d(φ_*ν') − ∫ f∘π dν|.
    pub rhs: f64,
}

impl MeasureCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-12 * self.rhs.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InducedQuotient {
    pub map: PointMap,
    pub eps0: f64,
    pub eps1: f64,
    pub defect: f64,
    pub measure: Vec<MeasureCheck>,
}

/// φ̄(x) = π(φ(s'(x))) between the quotients; `section` defaults to the
/// smallest point of each orbit. Errors if the defect exceeds 2·max(ε₀, ε₁).
pub fn induced_quotient_map(
    phi: &PointMap,
    source: &IsometricAction,
    target: &IsometricAction,
    section: Option<&[usize]>,
    tests: &[Vec<f64>],
) -> Result<InducedQuotient, MmError> {
    let (qs, pis) = quotient(phi.source(), source)?;
    let (qt, pit) = quotient(phi.target(), target)?;
    let canonical: Vec<usize> = source.orbits().iter().map(|o| o[0]).collect();
    let s = section.unwrap_or(&canonical);
    if s.len() != qs.n_points() || s.iter().enumerate().any(|(x, &u)| u >= pis.map().len() || pis.apply(u) != x) {
        return Err(MmError::InvalidSection);
    }
    let eps0 = isometry_defect(phi);
    let eps1 = equivariance_defect(phi, source, target)?;
    let bar: Vec<usize> = s.iter().map(|&u| pit.apply(phi.apply(u))).collect();
    let map = PointMap::new(qs.clone(), qt.clone(), bar)?;
    let defect = isometry_defect(&map);
    if defect > 2.0 * eps0.max(eps1) {
        return Err(MmError::BoundViolated { defect, bound: 2.0 * eps0.max(eps1) });
    }
    let src = phi.source();
    let mut measure = Vec::with_capacity(tests.len());
    for f in tests {
        if f.len() != qt.n_points() {
            return Err(MmError::InvalidMap("test function must live on the target quotient".into()));
        }
        let push: f64 = (0..qs.n_points()).map(|x| qs.measure()[x] * f[map.apply(x)]).sum();
        let base: f64 = (0..qt.n_points()).map(|p| qt.measure()[p] * f[p]).sum();
        let sup = (0..src.n_points())
            .map(|a| (f[map.apply(pis.apply(a))] - f[pit.apply(phi.apply(a))]).abs())
            .fold(0.0, f64::max);
        let up: f64 = (0..src.n_points()).map(|a| src.measure()[a] * f[pit.apply(phi.apply(a))]).sum();
        let lhs = (push - base).abs();
        let rhs = src.total_mass() * sup + (up - base).abs();
        measure.push(MeasureCheck { lhs, rhs });
    }
    Ok(InducedQuotient { map, eps0, eps1, defect, measure })
}

/// max over tests of |∫ f d(φ_*ν') − ∫ f dν|.
pub fn vague_gap(phi: &PointMap, tests: &[Vec<f64>]) -> Result<f64, MmError> {
    let push = phi.pushforward();
    let nu = phi.target().measure();
    let mut worst: f64 = 0.0;
    for f in tests {
        if f.len() != nu.len() {
            return Err(MmError::InvalidMap("test function length differs from the target".into()));
        }
        let gap: f64 = f.iter().zip(&push).zip(nu).map(|((v, a), b)| v * (a - b)).sum();
        worst = worst.max(gap.abs());
    }
    Ok(worst)
}
