//! Line bundles of constant curvature on flat tori: the magnetic Laplacian,
//! its ∂̄ part and holomorphic-section counts.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::bundle::{connection_from_flux, plaquette_curvature, BaseLattice, BundleError, DiscreteConnection};
use crate::group_rep::{wrap_angle, CompactGroupModel, GroupElement, RepresentationModel};
use crate::linalg::CsrMatrix;
use crate::spectral::{connection_laplacian, Domain, SpectralError, Spectrum, SymmetricOperator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HolomorphicError {
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("unresolved cluster (gap {gap:e} below 10×{tol:e})")]
    UnresolvedCluster { gap: f64, tol: f64 },
    #[error("spectrum does not extend past the lowest cluster")]
    SpectrumTooShort,
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Degree-k line bundle over the flat torus R²/(L₁Z × L₂Z) with its
/// constant-curvature connection, optionally twisted by a flat holonomy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticCurveBundle {
    pub periods: [f64; 2],
    pub degree: i64,
    /// Extra flat holonomy angles around the two cycles.
    pub holonomy: [f64; 2],
}

impl EllipticCurveBundle {
    pub fn new(periods: [f64; 2], degree: i64) -> Result<Self, HolomorphicError> {
        if periods.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(HolomorphicError::InvalidBundle("periods must be positive".into()));
        }
        Ok(Self { periods, degree, holonomy: [0.0; 2] })
    }

    pub fn with_holonomy(mut self, holonomy: [f64; 2]) -> Self {
        self.holonomy = holonomy;
        self
    }

    pub fn area(&self) -> f64 {
        self.periods[0] * self.periods[1]
    }

    /// μ = 2πk / area.
    pub fn mu(&self) -> f64 {
        2.0 * PI * self.degree as f64 / self.area()
    }

    pub fn base(&self, m: usize) -> Result<BaseLattice, HolomorphicError> {
        Ok(BaseLattice::torus_grid(&[m, m], &self.periods)?)
    }

    /// Landau-gauge links with the flat twist spread evenly over each cycle.
    pub fn connection(&self, m: usize) -> Result<DiscreteConnection, HolomorphicError> {
        let base = self.base(m)?;
        let u1 = CompactGroupModel::u1(8, 1.0).map_err(BundleError::from)?;
        let flux = connection_from_flux(&base, &u1, self.degree)?;
        if self.holonomy == [0.0; 2] {
            return Ok(flux);
        }
        let links = base
            .edges()
            .iter()
            .zip(flux.links())
            .map(|(e, g)| {
                let mu = e.direction.expect("grid edge");
                match g {
                    GroupElement::Angle(t) => GroupElement::Angle(wrap_angle(t + self.holonomy[mu] / m as f64)),
                    _ => unreachable!(),
                }
            })
            .collect();
        Ok(DiscreteConnection::new(base, u1, links)?)
    }
}

pub fn complex_structure() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

/// ∇*∇ on sections of the bundle over an m×m grid (real form, dimension 2m²).
pub fn landau_operator(bundle: &EllipticCurveBundle, m: usize) -> Result<SymmetricOperator, HolomorphicError> {
    let conn = bundle.connection(m)?;
    Ok(connection_laplacian(&conn, &RepresentationModel::u1_weight(1))?)
}

/// D̄ᵀMD̄ with D̄ = D_x + εJD_y, where D_μ s(v) = (ρ(U_{v,v+μ})s(v+μ) − s(v))/h_μ
/// and ε = −sign(k) (ε = 1 for k = 0); this is 2Δ_∂̄ in the continuum limit.
pub fn dbar_laplacian(bundle: &EllipticCurveBundle, m: usize) -> Result<SymmetricOperator, HolomorphicError> {
    let conn = bundle.connection(m)?;
    let base = conn.base();
    let rep = RepresentationModel::u1_weight(1);
    let h = base.spacing();
    let eps = if bundle.degree > 0 { -1.0 } else { 1.0 };
    let j = complex_structure();
    let n = base.n_vertices();
    let cell = base.cell_volume();
    let mut t = Vec::new();
    for v in 0..n {
        // rows of D̄ at v: entries (column, 2×2 block) for D_x and εJ·D_y
        let mut blocks: Vec<(usize, DMatrix<f64>)> = Vec::with_capacity(4);
        for mu in 0..2 {
            let w = base.shift(v, mu, 1);
            let r = rep.rho(&conn.grid_link(v, mu)) / h[mu];
            let id = DMatrix::identity(2, 2) / h[mu];
            let (fwd, here) = if mu == 0 { (r, -id) } else { (&j * r * eps, &j * (-id) * eps) };
            blocks.push((w, fwd));
            blocks.push((v, here));
        }
        for a in 0..2 {
            let row: Vec<(usize, f64)> = blocks.iter().flat_map(|(c, b)| (0..2).map(move |k| (c * 2 + k, b[(a, k)]))).collect();
            for &(c1, x) in &row {
                for &(c2, y) in &row {
                    if x != 0.0 && y != 0.0 {
                        t.push((c1, c2, cell * (x * y)));
                    }
                }
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(2 * n, &t);
    Ok(SymmetricOperator::new(matrix, vec![cell; 2 * n], Domain::Sections { rep: "dbar".into(), dim: 2 })?)
}

fn level_centers(values: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some(c) if v - c[0] <= tol => c.push(v),
            _ => out.push(vec![v]),
        }
    }
    out.iter().map(|c| c.iter().sum::<f64>() / c.len() as f64).collect()
}

/// max over the lowest `levels` distinct levels of |λ(∇*∇) − (λ(2Δ_∂̄) + μ)|,
/// both operators assembled from the same links.
///
/// Levels are compared as cluster centers: above the lowest level the lattice
/// ∂̄ operator carries extra multiplicity, so a multiset comparison fails.
pub fn dbar_identity_gap(bundle: &EllipticCurveBundle, m: usize, levels: usize) -> Result<f64, HolomorphicError> {
    let k = bundle.degree.unsigned_abs() as usize;
    let count = (4 * (k.max(1)) * levels + 4).min(2 * m * m);
    let a = crate::spectral::eigs(&landau_operator(bundle, m)?, count)?;
    let d = crate::spectral::eigs(&dbar_laplacian(bundle, m)?, count)?;
    let tol = default_cluster_tol(bundle.mu()).max(0.05 * bundle.mu().abs());
    let ca = level_centers(&a.values, tol);
    let cd = level_centers(&d.values, tol);
    if ca.len() <= levels || cd.len() <= levels {
        return Err(HolomorphicError::SpectrumTooShort);
    }
    Ok(ca.iter().zip(&cd).take(levels).map(|(x, y)| (x - y - bundle.mu()).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct H0Count {
    pub dimension: usize,
    pub center: f64,
    pub multiplicity: usize,
    /// Distance from the lowest cluster to the next eigenvalue.
    pub gap: f64,
    pub warning: Option<String>,
}

/// Half the multiplicity of the lowest eigenvalue cluster when it sits at μ.
pub fn h0_dimension(spectrum: &Spectrum, mu: f64, cluster_tol: f64) -> Result<H0Count, HolomorphicError> {
    let v = &spectrum.values;
    let Some(&first) = v.first() else { return Err(HolomorphicError::SpectrumTooShort) };
    let mult = v.iter().take_while(|&&x| x - first <= cluster_tol).count();
    if mult == v.len() {
        return Err(HolomorphicError::SpectrumTooShort);
    }
    let gap = v[mult] - v[mult - 1];
    if gap < 10.0 * cluster_tol {
        return Err(HolomorphicError::UnresolvedCluster { gap, tol: cluster_tol });
    }
    let center = v[..mult].iter().sum::<f64>() / mult as f64;
    if (center - mu).abs() <= cluster_tol {
        Ok(H0Count { dimension: mult / 2, center, multiplicity: mult, gap, warning: None })
    } else {
        let warning = Some(format!("lowest cluster at {center:.6} is not at μ = {mu:.6}"));
        Ok(H0Count { dimension: 0, center, multiplicity: mult, gap, warning })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct H0Row {
    pub degree: i64,
    pub area: f64,
    pub mu: f64,
    pub grid: usize,
    /// sup |F| over plaquettes.
    pub max_f: f64,
    pub dimension: usize,
    pub center: f64,
}

/// Lowest-cluster tolerance used by the table: 2% of |μ|, or an absolute
/// floor for flat bundles.
pub fn default_cluster_tol(mu: f64) -> f64 {
    (0.02 * mu.abs()).max(1e-6)
}

/// (k, area, ‖F‖_∞, dim H⁰) for each (bundle, grid size) pair.
pub fn h0_bound_table(family: &[(EllipticCurveBundle, usize)]) -> Result<Vec<H0Row>, HolomorphicError> {
    let mut rows = Vec::with_capacity(family.len());
    for (b, m) in family {
        let op = landau_operator(b, *m)?;
        let count = (2 * b.degree.unsigned_abs() as usize + 6).min(op.dim());
        let spectrum = crate::spectral::eigs(&op, count)?;
        let f = plaquette_curvature(&b.connection(*m)?)?;
        let max_f = f.max_norm(&DMatrix::identity(1, 1));
        let mu = b.mu();
        let h = h0_dimension(&spectrum, mu, default_cluster_tol(mu))?;
        rows.push(H0Row { degree: b.degree, area: b.area(), mu, grid: *m, max_f, dimension: h.dimension, center: h.center });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigs;

    fn torus(k: i64) -> EllipticCurveBundle {
        EllipticCurveBundle::new([2.0 * PI, 2.0 * PI], k).unwrap()
    }

    #[test]
    fn flat_bundle_has_two_dimensional_kernel() {
        let s = eigs(&landau_operator(&torus(0), 8).unwrap(), 4).unwrap();
        assert!(s.values[0].abs() < 1e-12 && s.values[1].abs() < 1e-12 && s.values[2] > 0.5);
    }

    #[test]
    fn conjugate_degrees_share_spectra() {
        let a = eigs(&landau_operator(&torus(2), 12).unwrap(), 12).unwrap();
        let b = eigs(&landau_operator(&torus(-2), 12).unwrap(), 12).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn twisted_flat_bundle_has_no_sections() {
        let b = torus(0).with_holonomy([1.0, 0.0]);
        let s = eigs(&landau_operator(&b, 16).unwrap(), 6).unwrap();
        // oracle: lowest eigenvalue (2 − 2cos(1/16))/h² with h = 2π/16
        let h = 2.0 * PI / 16.0;
        assert!((s.values[0] - (2.0 - 2.0 * (1.0f64 / 16.0).cos()) / (h * h)).abs() < 1e-12);
        assert_eq!(h0_dimension(&s, 0.0, 1e-3).unwrap().dimension, 0);
    }

    #[test]
    fn dbar_part_has_the_lowest_level_as_kernel() {
        for k in [1i64, -1, 2] {
            let b = torus(k);
            let d = eigs(&dbar_laplacian(&b, 16).unwrap(), 2 * k.unsigned_abs() as usize + 2).unwrap();
            assert!(d.values[0].abs() < 0.02 * b.mu().abs(), "k={k} {:?}", d.values);
        }
    }

    #[test]
    fn dbar_identity_converges_at_second_order() {
        let b = torus(1);
        let g: Vec<f64> = [8, 16, 32].iter().map(|&m| dbar_identity_gap(&b, m, 3).unwrap()).collect();
        assert!(g[0] / g[1] > 3.5 && g[1] / g[2] > 3.5, "{g:?}");
    }

    #[test]
    fn unresolved_cluster_is_an_error() {
        let s = eigs(&SymmetricOperator::diagonal(&[1.0, 1.0, 1.05, 3.0]), 4).unwrap();
        assert!(matches!(h0_dimension(&s, 1.0, 0.01), Err(HolomorphicError::UnresolvedCluster { .. })));
    }
}
