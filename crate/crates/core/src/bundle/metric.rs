//! Kaluza–Klein metric blocks and the total-space Ricci tensor in the adapted frame.

use nalgebra::DMatrix;

use super::base::BaseLattice;
use super::connection::DiscreteConnection;
use super::curvature::CurvatureField;
use super::BundleError;
use crate::group_rep::{CompactGroupModel, LieData};

/// Per-vertex metric in the frame (∂̂_1..∂̂_n, e_1^♯..e_k^♯).
#[derive(Debug, Clone, PartialEq)]
pub struct KKMetricField {
    pub n: usize,
    pub k: usize,
    pub blocks: Vec<DMatrix<f64>>,
}

/// h = diag(g, σ) at every vertex of a flat grid (g = δ) or graph.
pub fn kk_metric(base: &BaseLattice, conn: &DiscreteConnection, sigma: &DMatrix<f64>) -> Result<KKMetricField, BundleError> {
    let k = conn.group().lie_dim();
    if sigma.shape() != (k, k) {
        return Err(BundleError::DimensionMismatch("σ must match the Lie algebra".into()));
    }
    if k > 0 && sigma.clone().cholesky().is_none() {
        return Err(BundleError::SingularMetric);
    }
    let n = base.dims();
    let mut h = DMatrix::zeros(n + k, n + k);
    h.view_mut((0, 0), (n, n)).fill_with_identity();
    h.view_mut((n, n), (k, k)).copy_from(sigma);
    Ok(KKMetricField { n, k, blocks: vec![h; base.n_vertices()] })
}

impl KKMetricField {
    /// Σ_v √det h_v · mass_v · μ_δ(G), with μ_δ(G) the volume of (G, δ).
    pub fn total_volume(&self, base: &BaseLattice, group: &CompactGroupModel) -> Option<f64> {
        let unit = group.lie_volume()? / group.sigma().determinant().sqrt();
        Some(
            self.blocks
                .iter()
                .zip(base.vertex_mass())
                .map(|(h, m)| h.determinant().sqrt() * m * unit)
                .sum(),
        )
    }

    pub fn mixed_block_max(&self) -> f64 {
        self.blocks
            .iter()
            .map(|h| h.view((0, self.n), (self.n, self.k)).amax())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RicciBlocks {
    pub n: usize,
    pub k: usize,
    /// Full (n+k)×(n+k) Ricci matrix per vertex.
    pub matrices: Vec<DMatrix<f64>>,
    /// Min over vertices of the smallest eigenvalue of R̂ic relative to h.
    pub kappa: f64,
}

impl RicciBlocks {
    pub fn hh(&self, v: usize) -> DMatrix<f64> {
        self.matrices[v].view((0, 0), (self.n, self.n)).into_owned()
    }

    pub fn hv(&self, v: usize) -> DMatrix<f64> {
        self.matrices[v].view((0, self.n), (self.n, self.k)).into_owned()
    }

    pub fn vv(&self, v: usize) -> DMatrix<f64> {
        self.matrices[v].view((self.n, self.n), (self.k, self.k)).into_owned()
    }
}

/// Ricci tensor of h(g = δ, A, σ) at one point from F_{ij}^α (layout
/// `(i·n + j)·k + α`), {(d^∇)*F}_j^α (layout `j·k + α`) and the base Ricci.
pub fn ricci_blocks_at(f: &[f64], dstar_f: &[f64], lie: &LieData, base_ricci: &DMatrix<f64>) -> DMatrix<f64> {
    let n = base_ricci.nrows();
    let k = lie.dim();
    let s = &lie.sigma;
    let fa = |i: usize, j: usize, a: usize| f[(i * n + j) * k + a];
    let mut r = DMatrix::zeros(n + k, n + k);
    // (F*F)_{jk}^{αβ} = Σ_i F_{ji}^α F_{ki}^β
    for j in 0..n {
        for l in 0..n {
            let mut ff = 0.0;
            for i in 0..n {
                for a in 0..k {
                    for b in 0..k {
                        ff += fa(j, i, a) * fa(l, i, b) * s[(a, b)];
                    }
                }
            }
            r[(j, l)] = base_ricci[(j, l)] - 0.5 * ff;
        }
    }
    for j in 0..n {
        for b in 0..k {
            let v: f64 = (0..k).map(|m| dstar_f[j * k + m] * s[(b, m)]).sum();
            r[(j, n + b)] = 0.5 * v;
            r[(n + b, j)] = 0.5 * v;
        }
    }
    let sinv = if k > 0 { s.clone().try_inverse().unwrap_or_else(|| DMatrix::zeros(k, k)) } else { DMatrix::zeros(0, 0) };
    let basis = |a: usize| {
        let mut e = vec![0.0; k];
        e[a] = 1.0;
        e
    };
    for b in 0..k {
        for m in 0..k {
            // ¼ Σ_{j,i} (σF_{ji})_β (σF_{ji})_μ
            let mut t1 = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let sb: f64 = (0..k).map(|a| fa(j, i, a) * s[(a, b)]).sum();
                    let sm: f64 = (0..k).map(|a| fa(j, i, a) * s[(a, m)]).sum();
                    t1 += sb * sm;
                }
            }
            let mut t2 = 0.0;
            for a in 0..k {
                for d in 0..k {
                    if sinv[(a, d)] == 0.0 {
                        continue;
                    }
                    let x = lie.bracket(&basis(a), &basis(b));
                    let y = lie.bracket(&basis(d), &basis(m));
                    t2 += sinv[(a, d)] * lie.sigma_of(&x, &y);
                }
            }
            r[(n + b, n + m)] = 0.25 * t1 + 0.25 * t2;
        }
    }
    r
}

/// Smallest eigenvalue of R relative to h.
pub fn relative_min_eigenvalue(r: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<f64, BundleError> {
    if r.nrows() == 0 {
        return Ok(0.0);
    }
    let l = h.clone().cholesky().ok_or(BundleError::SingularMetric)?;
    let linv = l.l().try_inverse().ok_or(BundleError::SingularMetric)?;
    let mut m = &linv * r * linv.transpose();
    crate::linalg::symmetrize(&mut m);
    Ok(m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

/// All three Ricci blocks at every vertex of a flat grid.
///
/// The nonabelian case is accepted only when F vanishes, since the lattice
/// carries no vertical derivative of F.
pub fn ricci_h(
    base: &BaseLattice,
    curvature: &CurvatureField,
    group: &CompactGroupModel,
    base_ricci: Option<&[DMatrix<f64>]>,
) -> Result<RicciBlocks, BundleError> {
    if !base.is_grid() {
        return Err(BundleError::NotGrid);
    }
    let lie = group.lie().ok_or_else(|| BundleError::Unsupported("Ricci blocks need a Lie group".into()))?;
    let n = base.dims();
    let k = lie.dim();
    if curvature.dims() != n || curvature.lie_dim() != k || curvature.n_sites() != base.n_vertices() {
        return Err(BundleError::DimensionMismatch("curvature field does not fit the base".into()));
    }
    let f = curvature.at_vertices();
    if !group.is_abelian() && f.max_norm(&lie.sigma) > 0.0 {
        return Err(BundleError::Unsupported("nonabelian Ricci needs F = 0 on the lattice".into()));
    }
    let dstar = f.covariant_derivative().codifferential();
    let zero = DMatrix::zeros(n, n);
    let mut h = DMatrix::zeros(n + k, n + k);
    h.view_mut((0, 0), (n, n)).fill_with_identity();
    h.view_mut((n, n), (k, k)).copy_from(&lie.sigma);
    let mut matrices = Vec::with_capacity(base.n_vertices());
    let mut kappa = f64::INFINITY;
    for v in 0..base.n_vertices() {
        let mut fv = vec![0.0; n * n * k];
        for i in 0..n {
            for j in 0..n {
                fv[(i * n + j) * k..(i * n + j + 1) * k].copy_from_slice(f.get(v, i, j));
            }
        }
        let ric = base_ricci.map_or(&zero, |r| &r[v]);
        let r = ricci_blocks_at(&fv, &dstar[v * n * k..(v + 1) * n * k], lie, ric);
        kappa = kappa.min(relative_min_eigenvalue(&r, &h)?);
        matrices.push(r);
    }
    Ok(RicciBlocks { n, k, matrices, kappa })
}
