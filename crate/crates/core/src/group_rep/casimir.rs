//! Casimir invariants, Haar averages and isotypic projectors.

use nalgebra::DMatrix;

use super::group::CompactGroupModel;
use super::rep::RepresentationModel;
use super::GroupError;

/// Residual tolerance for the scalar Casimir check.
pub const CASIMIR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CasimirValue {
    pub chi: f64,
    /// ‖σ^{αβ}ρ_*(e_α)ρ_*(e_β) + χI‖_∞
    pub residual: f64,
    pub matrix: DMatrix<f64>,
}

/// χ with σ^{αβ}ρ_*(e_α)ρ_*(e_β) = −χ·I.
///
/// χ is the negated mean diagonal. A residual above [`CASIMIR_TOL`] is an
/// error only when the representation is flagged irreducible.
pub fn casimir(rep: &RepresentationModel, group: &CompactGroupModel) -> Result<CasimirValue, GroupError> {
    let lie = group.lie().ok_or(GroupError::NotLie)?;
    let k = lie.dim();
    if rep.rho_star().len() != k {
        return Err(GroupError::DimensionMismatch("ρ_* needs one matrix per basis vector".into()));
    }
    let sigma = &lie.sigma;
    let scale = sigma.amax().max(f64::MIN_POSITIVE);
    let inv = sigma
        .clone()
        .cholesky()
        .filter(|c| c.l().diagonal().iter().all(|d| d * d > 1e-14 * scale))
        .map(|c| c.inverse())
        .ok_or(GroupError::DegenerateMetric)?;
    let d = rep.dim();
    let mut c = DMatrix::zeros(d, d);
    for a in 0..k {
        for b in 0..k {
            if inv[(a, b)] != 0.0 {
                c += &rep.rho_star()[a] * &rep.rho_star()[b] * inv[(a, b)];
            }
        }
    }
    let chi = -c.trace() / d as f64;
    let residual = (&c + DMatrix::identity(d, d) * chi).amax();
    if rep.irreducible() && residual > CASIMIR_TOL {
        return Err(GroupError::NotScalar(residual));
    }
    Ok(CasimirValue { chi, residual, matrix: c })
}

/// Max Ad-invariance defect of σ over basis triples.
pub fn check_ad_invariance(group: &CompactGroupModel) -> Result<f64, GroupError> {
    group.lie().map(|l| l.ad_invariance_defect()).ok_or(GroupError::NotLie)
}

/// Weighted mean of matrix samples `(weight, value)`.
pub fn weighted_mean(samples: &[(f64, DMatrix<f64>)]) -> Result<DMatrix<f64>, GroupError> {
    let (_, first) = samples.first().ok_or(GroupError::EmptySamples)?;
    let mut acc = DMatrix::zeros(first.nrows(), first.ncols());
    let mut total = 0.0;
    for (w, v) in samples {
        if v.shape() != first.shape() {
            return Err(GroupError::DimensionMismatch("samples differ in shape".into()));
        }
        if *w < 0.0 {
            return Err(GroupError::InvalidQuadrature("negative weight".into()));
        }
        acc += v * *w;
        total += w;
    }
    if total <= 0.0 {
        return Err(GroupError::InvalidQuadrature("weights sum to zero".into()));
    }
    Ok(acc / total)
}

/// ∫_G f dμ / μ(G) with the group's Haar weights.
pub fn haar_average<F>(group: &CompactGroupModel, f: F) -> Result<DMatrix<f64>, GroupError>
where
    F: Fn(&super::GroupElement) -> DMatrix<f64>,
{
    let samples: Vec<_> = group
        .elements()
        .iter()
        .zip(group.haar_weights())
        .map(|(g, w)| (*w, f(g)))
        .collect();
    weighted_mean(&samples)
}

/// Pullback matrices of a right action given by `perms[γ][u] = u·γ`:
/// `(R_γ^* f)(u) = f(uγ)`.
pub fn permutation_matrices(perms: &[Vec<usize>]) -> Vec<DMatrix<f64>> {
    perms
        .iter()
        .map(|p| {
            let n = p.len();
            let mut m = DMatrix::zeros(n, n);
            for (u, &ug) in p.iter().enumerate() {
                m[(u, ug)] = 1.0;
            }
            m
        })
        .collect()
}

/// Π = (1/μ(G)) Σ_γ w_γ R(γ) ⊗ ρ(γ) on (functions on the carrier) ⊗ V.
///
/// Index convention: carrier index `u`, fiber index `a` → `u·dim V + a`.
pub fn isotypic_projector(
    group: &CompactGroupModel,
    rep: &RepresentationModel,
    action: &[DMatrix<f64>],
    carrier_dimension: usize,
) -> Result<DMatrix<f64>, GroupError> {
    if action.len() != group.len() {
        return Err(GroupError::DimensionMismatch(format!(
            "{} action matrices for {} group elements",
            action.len(),
            group.len()
        )));
    }
    if action.iter().any(|r| r.nrows() != carrier_dimension || r.ncols() != carrier_dimension) {
        return Err(GroupError::DimensionMismatch("action matrix size differs from carrier".into()));
    }
    let samples: Vec<_> = group
        .elements()
        .iter()
        .zip(group.haar_weights())
        .zip(action)
        .map(|((g, w), r)| (*w, r.kronecker(&rep.rho(g))))
        .collect();
    weighted_mean(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_rep::GroupElement;

    fn rank(m: &DMatrix<f64>) -> usize {
        m.clone().svd(false, false).singular_values.iter().filter(|s| **s > 1e-9).count()
    }

    #[test]
    fn u1_weights_follow_n_squared() {
        let g = CompactGroupModel::u1(8, 1.0).unwrap();
        for n in 0..=6i64 {
            let c = casimir(&RepresentationModel::u1_weight(n), &g).unwrap();
            // oracle: (nJ)² = −n² I
            assert!((c.chi - (n * n) as f64).abs() < 1e-12);
            assert!(c.residual < 1e-12);
        }
    }

    #[test]
    fn su2_adjoint_and_spin_half() {
        let g = CompactGroupModel::su2(1, DMatrix::identity(3, 3)).unwrap();
        let adj = casimir(&RepresentationModel::su2_adjoint(), &g).unwrap();
        assert!((adj.chi - 2.0).abs() < 1e-12);
        let half = casimir(&RepresentationModel::su2_spin_half(), &g).unwrap();
        assert!((half.chi - 0.75).abs() < 1e-12);
        let scaled = g.with_sigma(DMatrix::identity(3, 3) * 2.5).unwrap();
        let adj2 = casimir(&RepresentationModel::su2_adjoint(), &scaled).unwrap();
        assert!((adj2.chi - 2.0 / 2.5).abs() < 1e-12);
    }

    #[test]
    fn nonscalar_and_degenerate_errors() {
        let g = CompactGroupModel::su2(1, DMatrix::from_diagonal(&nalgebra::dvector![1.0, 1.0, 2.0])).unwrap();
        assert!(matches!(
            casimir(&RepresentationModel::su2_adjoint(), &g),
            Err(GroupError::NotScalar(_))
        ));
        let flat = CompactGroupModel::u1(4, 1.0).unwrap().with_sigma(DMatrix::zeros(1, 1)).unwrap();
        assert_eq!(casimir(&RepresentationModel::u1_weight(1), &flat), Err(GroupError::DegenerateMetric));
    }

    #[test]
    fn ad_invariance_examples() {
        let u1 = CompactGroupModel::u1(4, 3.0).unwrap();
        assert_eq!(check_ad_invariance(&u1).unwrap(), 0.0);
        let su2 = CompactGroupModel::su2(1, DMatrix::identity(3, 3)).unwrap();
        assert!(check_ad_invariance(&su2).unwrap() < 1e-12);
        let bad = su2.with_sigma(DMatrix::from_diagonal(&nalgebra::dvector![1.0, 1.0, 2.0])).unwrap();
        // σ([e_1,e_2],e_3) + σ(e_2,[e_1,e_3]) = 2 − 1
        assert!((check_ad_invariance(&bad).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_examples() {
        let z3 = CompactGroupModel::cyclic(3);
        let v = DMatrix::from_element(2, 1, 0.7);
        assert_eq!(haar_average(&z3, |_| v.clone()).unwrap(), v);
        let u1 = CompactGroupModel::u1(3, 1.0).unwrap();
        let cos = haar_average(&u1, |g| match g {
            GroupElement::Angle(t) => DMatrix::from_element(1, 1, t.cos()),
            _ => unreachable!(),
        })
        .unwrap();
        assert!(cos[(0, 0)].abs() < 1e-12);
        let rho1 = RepresentationModel::u1_weight(1);
        assert!(haar_average(&u1, |g| rho1.rho(g)).unwrap().amax() < 1e-12);
        assert!(weighted_mean(&[]).is_err());
    }

    #[test]
    fn su2_quadrature_orthogonality() {
        // ∫ ρ_adj ⊗ ρ_adj picks out one invariant: trace of the average is 1
        let g = CompactGroupModel::su2(2, DMatrix::identity(3, 3)).unwrap();
        let adj = RepresentationModel::su2_adjoint();
        let avg = haar_average(&g, |q| adj.rho(q).kronecker(&adj.rho(q))).unwrap();
        assert!((avg.trace() - 1.0).abs() < 1e-12);
        assert!(haar_average(&g, |q| adj.rho(q)).unwrap().amax() < 1e-12);
    }

    #[test]
    fn projector_examples() {
        let z2 = CompactGroupModel::cyclic(2);
        let perms = vec![vec![0, 1], vec![1, 0]];
        let sign = RepresentationModel::from_matrices(
            "sign",
            vec![DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, -1.0)],
            true,
        )
        .unwrap();
        let p = isotypic_projector(&z2, &sign, &permutation_matrices(&perms), 2).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert!((p - expected).amax() < 1e-15);

        let z3 = CompactGroupModel::cyclic(3);
        let perms: Vec<Vec<usize>> = (0..3).map(|g| (0..3).map(|u| (u + g) % 3).collect()).collect();
        let r = RepresentationModel::cyclic_rotation(3, 1);
        let p = isotypic_projector(&z3, &r, &permutation_matrices(&perms), 3).unwrap();
        assert!((&p * &p - &p).amax() < 1e-12);
        assert!((&p - p.transpose()).amax() < 1e-12);
        assert_eq!(rank(&p), 2);

        let triv = RepresentationModel::trivial(1, 0);
        let id = isotypic_projector(&CompactGroupModel::cyclic(1), &triv, &[DMatrix::identity(3, 3)], 3).unwrap();
        assert_eq!(id, DMatrix::identity(3, 3));
    }
}
