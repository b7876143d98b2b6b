//! Orbit sweeps δ_V and equivariant bump sections.

use nalgebra::{DMatrix, DVector};

use super::{quotient, FiniteMMSpace, IsometricAction, MmError};
use crate::group_rep::{CompactGroupModel, RepresentationModel};

/// Every subgroup of a finite group as sorted element lists, by size then
/// lexicographically.
pub fn subgroups(group: &CompactGroupModel) -> Result<Vec<Vec<usize>>, MmError> {
    let table = group.table().ok_or(MmError::NoTable)?;
    let mut found: Vec<Vec<usize>> = (0..table.order()).map(|g| table.generated_subgroup(&[g])).collect();
    found.sort();
    found.dedup();
    let mut i = 0;
    while i < found.len() {
        for j in 0..i {
            let mut gens = found[i].clone();
            gens.extend(&found[j]);
            let h = table.generated_subgroup(&gens);
            if !found.contains(&h) {
                found.push(h);
            }
        }
        i += 1;
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    Ok(found)
}

/// dim V^H from the trace of the averaged representation over H.
pub fn fixed_dimension(group: &CompactGroupModel, rep: &RepresentationModel, h: &[usize]) -> usize {
    let mut avg = DMatrix::zeros(rep.dim(), rep.dim());
    for &g in h {
        avg += rep.rho(&group.element(g));
    }
    (avg.trace() / h.len() as f64).round() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaV {
    /// δ_V(u) per point; +∞ when no supplied subgroup has V^H = 0.
    pub values: Vec<f64>,
    /// Indices into the supplied list of subgroups with V^H = 0.
    pub admissible: Vec<usize>,
}

/// δ_V(u) = min over admissible H of max over h ∈ H of d(u, uh).
pub fn delta_v(
    space: &FiniteMMSpace,
    act: &IsometricAction,
    rep: &RepresentationModel,
    subgroups: &[Vec<usize>],
) -> Result<DeltaV, MmError> {
    act.validate_on(space)?;
    let group = act.group();
    let admissible: Vec<usize> = (0..subgroups.len())
        .filter(|&i| fixed_dimension(group, rep, &subgroups[i]) == 0)
        .collect();
    let values = (0..space.n_points())
        .map(|u| {
            admissible
                .iter()
                .map(|&i| subgroups[i].iter().map(|&h| space.dist(u, act.apply(u, h))).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(DeltaV { values, admissible })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BumpSections {
    /// f̂_i as an n × dim V matrix (row u is f̂_i(u)).
    pub sections: Vec<DMatrix<f64>>,
    /// ν-weighted Gram matrix of the sections.
    pub gram: DMatrix<f64>,
    pub rank: usize,
}

/// f(u) = d(u, B(c, 2δ)^c) / (d(u, B̄(c, δ)) + d(u, B(c, 2δ)^c)).
pub fn cutoff(space: &FiniteMMSpace, center: usize, delta: f64) -> Vec<f64> {
    let n = space.n_points();
    let inner: Vec<usize> = (0..n).filter(|&v| space.dist(center, v) <= delta).collect();
    let outer: Vec<usize> = (0..n).filter(|&v| space.dist(center, v) >= 2.0 * delta).collect();
    (0..n)
        .map(|u| {
            let a = space.dist_to_set(u, &outer);
            if a.is_infinite() {
                return 1.0;
            }
            let b = space.dist_to_set(u, &inner);
            a / (a + b)
        })
        .collect()
}

/// Averaged bumps f̂_i(u) = (1/|G|) Σ_γ f_i(uγ) ρ(γ) v_i around the given
/// orbit representatives; errors unless their rank equals their number.
pub fn bump_dimension_bound(
    space: &FiniteMMSpace,
    act: &IsometricAction,
    rep: &RepresentationModel,
    orbit_reps: &[usize],
    vectors: &[DVector<f64>],
    delta: f64,
) -> Result<BumpSections, MmError> {
    let group = act.group();
    if vectors.len() != orbit_reps.len() || vectors.iter().any(|v| v.len() != rep.dim()) {
        return Err(MmError::InvalidMap("one vector of dimension dim V per orbit".into()));
    }
    if !(delta > 0.0) {
        return Err(MmError::InvalidMap("δ must be positive".into()));
    }
    let (q, pi) = quotient(space, act)?;
    for (a, &u) in orbit_reps.iter().enumerate() {
        for &w in &orbit_reps[..a] {
            if q.dist(pi.apply(u), pi.apply(w)) < 4.0 * delta {
                return Err(MmError::NotSeparated);
            }
        }
    }
    for (&u, v) in orbit_reps.iter().zip(vectors) {
        for g in act.stabilizer(u) {
            if (rep.rho(&group.element(g)) * v - v).amax() > 1e-12 {
                return Err(MmError::NotFixed(u));
            }
        }
    }
    let n = space.n_points();
    let rhos: Vec<DMatrix<f64>> = rep.matrices_on(group);
    let order = group.len() as f64;
    let sections: Vec<DMatrix<f64>> = orbit_reps
        .iter()
        .zip(vectors)
        .map(|(&c, v)| {
            let f = cutoff(space, c, delta);
            let mut s = DMatrix::zeros(n, rep.dim());
            for u in 0..n {
                let mut acc = DVector::zeros(rep.dim());
                for (g, r) in rhos.iter().enumerate() {
                    let x = f[act.apply(u, g)];
                    if x != 0.0 {
                        acc += r * v * x;
                    }
                }
                s.row_mut(u).copy_from(&(acc / order).transpose());
            }
            s
        })
        .collect();
    let k = sections.len();
    let mut gram = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            gram[(a, b)] = (0..n).map(|u| space.measure()[u] * sections[a].row(u).dot(&sections[b].row(u))).sum();
        }
    }
    let eig = gram.clone().symmetric_eigenvalues();
    let top = eig.iter().copied().fold(0.0, f64::max);
    let rank = eig.iter().filter(|&&l| l > 1e-10 * top.max(f64::MIN_POSITIVE)).count();
    if rank != k {
        return Err(MmError::RankDeficient { rank, expected: k });
    }
    Ok(BumpSections { sections, gram, rank })
}

/// max over (u, γ) of |f̂(uγ) − ρ(γ)⁻¹ f̂(u)|.
pub fn section_equivariance_defect(act: &IsometricAction, rep: &RepresentationModel, s: &DMatrix<f64>) -> f64 {
    let group = act.group();
    let mut worst: f64 = 0.0;
    for g in 0..group.len() {
        let rinv = rep.rho(&group.element(g)).transpose();
        for u in 0..act.n_points() {
            let lhs = s.row(act.apply(u, g)).transpose();
            let rhs = &rinv * s.row(u).transpose();
            worst = worst.max((lhs - rhs).amax());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_rep::real_irreps;

    fn z4_circle() -> (FiniteMMSpace, IsometricAction) {
        let z4 = CompactGroupModel::cyclic(4);
        let space = FiniteMMSpace::cycle(4).unwrap();
        (space, IsometricAction::regular(z4).unwrap())
    }

    #[test]
    fn subgroups_of_small_groups() {
        assert_eq!(subgroups(&CompactGroupModel::cyclic(4)).unwrap().len(), 3);
        assert_eq!(subgroups(&CompactGroupModel::cyclic(6)).unwrap().len(), 4);
        assert_eq!(subgroups(&CompactGroupModel::symmetric3()).unwrap().len(), 6);
    }

    #[test]
    fn delta_v_on_z4() {
        let (space, act) = z4_circle();
        let subs = subgroups(act.group()).unwrap();
        let rot = RepresentationModel::cyclic_rotation(4, 1);
        let d = delta_v(&space, &act, &rot, &subs).unwrap();
        // oracle: admissible are Z_2 (sweep d(u, u+2) = 2) and Z_4 (sweep 2)
        assert_eq!(d.admissible.len(), 2);
        assert!(d.values.iter().all(|&v| v == 2.0));
        let triv = RepresentationModel::trivial(1, 0);
        assert!(delta_v(&space, &act, &triv, &subs).unwrap().values.iter().all(|v| v.is_infinite()));
    }

    #[test]
    fn fixed_point_has_zero_delta() {
        let space = FiniteMMSpace::cycle(3).unwrap();
        let act = IsometricAction::trivial(CompactGroupModel::cyclic(2), 3).unwrap();
        let sign = real_irreps(act.group()).unwrap().pop().unwrap();
        let d = delta_v(&space, &act, &sign, &subgroups(act.group()).unwrap()).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn free_z3_on_twelve_points() {
        // 12-cycle, Z_3 acting by rotation through 4 steps: four orbits
        let z3 = CompactGroupModel::cyclic(3);
        let space = FiniteMMSpace::cycle(12).unwrap();
        let perms = (0..3).map(|g| (0..12).map(|u| (u + 4 * g) % 12).collect()).collect();
        let act = IsometricAction::new(z3, perms).unwrap();
        for rep in real_irreps(act.group()).unwrap() {
            let v = DVector::from_element(rep.dim(), 1.0).normalize();
            let b = bump_dimension_bound(&space, &act, &rep, &[0, 1, 2, 3], &vec![v; 4], 0.25).unwrap();
            assert_eq!(b.rank, 4);
            for s in &b.sections {
                assert!(section_equivariance_defect(&act, &rep, s) < 1e-15);
            }
        }
    }

    #[test]
    fn overlapping_orbits_are_rejected() {
        let z3 = CompactGroupModel::cyclic(3);
        let space = FiniteMMSpace::cycle(12).unwrap();
        let perms = (0..3).map(|g| (0..12).map(|u| (u + 4 * g) % 12).collect()).collect();
        let act = IsometricAction::new(z3, perms).unwrap();
        let triv = RepresentationModel::trivial(1, 0);
        let v = DVector::from_element(1, 1.0);
        let r = bump_dimension_bound(&space, &act, &triv, &[0, 1], &[v.clone(), v], 0.5);
        assert_eq!(r.unwrap_err(), MmError::NotSeparated);
    }
}
