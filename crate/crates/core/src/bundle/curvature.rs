//! Plaquette curvature, its covariant derivative and codifferential on grids.

use std::f64::consts::PI;

use super::base::BaseLattice;
use super::connection::DiscreteConnection;
use super::BundleError;
use crate::group_rep::{GroupElement, GroupKind};

/// Guard against the cut locus of exp.
pub const LOG_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldLocation {
    /// Site `v` holds the plaquette spanned at `v` (centre v + (h_i e_i + h_j e_j)/2).
    Plaquette,
    Vertex,
}

/// F_{ij}^α per site, stored at `((site·n + i)·n + j)·k + α`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    sizes: Vec<usize>,
    spacing: Vec<f64>,
    lie_dim: usize,
    location: FieldLocation,
    values: Vec<f64>,
}

impl CurvatureField {
    pub fn zeros(base: &BaseLattice, lie_dim: usize, location: FieldLocation) -> Self {
        let n = base.dims();
        Self {
            sizes: base.sizes().to_vec(),
            spacing: base.spacing(),
            lie_dim,
            location,
            values: vec![0.0; base.n_vertices() * n * n * lie_dim],
        }
    }

    /// Vertex-located field from a closure returning F_{ij}^α at a point,
    /// laid out as `(i·n + j)·k + α`. Antisymmetry is imposed from i < j.
    pub fn from_fn<F>(base: &BaseLattice, lie_dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let mut out = Self::zeros(base, lie_dim, FieldLocation::Vertex);
        let n = base.dims();
        for v in 0..base.n_vertices() {
            let vals = f(&base.coordinates(v));
            for i in 0..n {
                for j in (i + 1)..n {
                    for a in 0..lie_dim {
                        let x = vals[(i * n + j) * lie_dim + a];
                        out.set(v, i, j, a, x);
                    }
                }
            }
        }
        out
    }

    pub fn dims(&self) -> usize {
        self.sizes.len()
    }

    pub fn lie_dim(&self) -> usize {
        self.lie_dim
    }

    pub fn location(&self) -> FieldLocation {
        self.location
    }

    pub fn n_sites(&self) -> usize {
        self.sizes.iter().product()
    }

    fn offset(&self, site: usize, i: usize, j: usize) -> usize {
        let n = self.dims();
        ((site * n + i) * n + j) * self.lie_dim
    }

    pub fn get(&self, site: usize, i: usize, j: usize) -> &[f64] {
        let o = self.offset(site, i, j);
        &self.values[o..o + self.lie_dim]
    }

    /// Sets F_ij^α and F_ji^α = −F_ij^α.
    pub fn set(&mut self, site: usize, i: usize, j: usize, alpha: usize, x: f64) {
        let o = self.offset(site, i, j) + alpha;
        self.values[o] = x;
        let o = self.offset(site, j, i) + alpha;
        self.values[o] = -x;
    }

    /// |F|² = Σ_{i<j} σ(F_ij, F_ij) at a site.
    pub fn norm_sq(&self, site: usize, sigma: &nalgebra::DMatrix<f64>) -> f64 {
        let n = self.dims();
        let k = self.lie_dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let f = self.get(site, i, j);
                for a in 0..k {
                    for b in 0..k {
                        s += f[a] * sigma[(a, b)] * f[b];
                    }
                }
            }
        }
        s
    }

    pub fn max_norm(&self, sigma: &nalgebra::DMatrix<f64>) -> f64 {
        (0..self.n_sites()).map(|v| self.norm_sq(v, sigma).sqrt()).fold(0.0, f64::max)
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dims();
        let mut d: f64 = 0.0;
        for v in 0..self.n_sites() {
            for i in 0..n {
                for j in 0..n {
                    for (x, y) in self.get(v, i, j).iter().zip(self.get(v, j, i)) {
                        d = d.max((x + y).abs());
                    }
                }
            }
        }
        d
    }

    fn shift(&self, v: usize, mu: usize, steps: isize) -> usize {
        let mut idx = vec![0; self.dims()];
        let mut r = v;
        for m in (0..self.dims()).rev() {
            idx[m] = r % self.sizes[m];
            r /= self.sizes[m];
        }
        let m = self.sizes[mu] as isize;
        idx[mu] = (idx[mu] as isize + steps).rem_euclid(m) as usize;
        self.sizes.iter().zip(&idx).fold(0, |acc, (&m, &i)| acc * m + i)
    }

    /// Vertex values as the mean of the four plaquettes of each (i,j)-plane
    /// meeting the vertex; second-order accurate for smooth fields.
    pub fn at_vertices(&self) -> Self {
        if self.location == FieldLocation::Vertex {
            return self.clone();
        }
        let n = self.dims();
        let mut out = self.clone();
        out.location = FieldLocation::Vertex;
        for v in 0..self.n_sites() {
            for i in 0..n {
                for j in (i + 1)..n {
                    let vi = self.shift(v, i, -1);
                    let vj = self.shift(v, j, -1);
                    let vij = self.shift(vi, j, -1);
                    for a in 0..self.lie_dim {
                        let m = 0.25
                            * (self.get(v, i, j)[a] + self.get(vi, i, j)[a] + self.get(vj, i, j)[a] + self.get(vij, i, j)[a]);
                        out.set(v, i, j, a, m);
                    }
                }
            }
        }
        out
    }

    /// Centered derivative ∂_k F_ij^α at each vertex (flat metric, Γ = 0).
    pub fn covariant_derivative(&self) -> NablaF {
        let f = self.at_vertices();
        let n = self.dims();
        let k = self.lie_dim;
        let mut values = vec![0.0; self.n_sites() * n * n * n * k];
        for v in 0..self.n_sites() {
            for d in 0..n {
                let (p, m) = (f.shift(v, d, 1), f.shift(v, d, -1));
                let h2 = 2.0 * self.spacing[d];
                for i in 0..n {
                    for j in 0..n {
                        for a in 0..k {
                            let o = (((v * n + d) * n + i) * n + j) * k + a;
                            values[o] = (f.get(p, i, j)[a] - f.get(m, i, j)[a]) / h2;
                        }
                    }
                }
            }
        }
        NablaF { n_sites: self.n_sites(), n, k, values }
    }
}

/// (∇F)_{kij}^α at vertices, stored at `(((site·n + k)·n + i)·n + j)·lie + α`.
#[derive(Debug, Clone, PartialEq)]
pub struct NablaF {
    n_sites: usize,
    n: usize,
    k: usize,
    values: Vec<f64>,
}

impl NablaF {
    pub fn get(&self, site: usize, d: usize, i: usize, j: usize) -> &[f64] {
        let o = (((site * self.n + d) * self.n + i) * self.n + j) * self.k;
        &self.values[o..o + self.k]
    }

    /// max over cyclic sums (∇F)_{ijk} + (∇F)_{jki} + (∇F)_{kij}.
    pub fn bianchi_defect(&self) -> f64 {
        let n = self.n;
        let mut d: f64 = 0.0;
        for v in 0..self.n_sites {
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        for a in 0..self.k {
                            let s = self.get(v, i, j, l)[a] + self.get(v, j, l, i)[a] + self.get(v, l, i, j)[a];
                            d = d.max(s.abs());
                        }
                    }
                }
            }
        }
        d
    }

    /// {(d^∇)*F}_j^α = −Σ_i (∇F)_{iij}^α, laid out `(site·n + j)·k + α`.
    pub fn codifferential(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; self.n_sites * n * self.k];
        for v in 0..self.n_sites {
            for j in 0..n {
                for a in 0..self.k {
                    out[(v * n + j) * self.k + a] = -(0..n).map(|i| self.get(v, i, i, j)[a]).sum::<f64>();
                }
            }
        }
        out
    }
}

/// F_{μν} = log(plaquette)/(h_μ h_ν) at each plaquette.
pub fn plaquette_curvature(conn: &DiscreteConnection) -> Result<CurvatureField, BundleError> {
    let base = conn.base();
    if !base.is_grid() {
        return Err(BundleError::NotGrid);
    }
    let group = conn.group();
    if group.kind() == GroupKind::Finite {
        return Err(BundleError::Unsupported("finite groups have no Lie algebra; compare plaquette classes".into()));
    }
    let n = base.dims();
    let h = base.spacing();
    let mut field = CurvatureField::zeros(base, group.lie_dim(), FieldLocation::Plaquette);
    for v in 0..base.n_vertices() {
        for mu in 0..n {
            for nu in (mu + 1)..n {
                let p = conn.plaquette(v, mu, nu);
                let (x, angle) = group.log(&p)?;
                if angle >= PI - LOG_GUARD {
                    return Err(BundleError::PlaquetteTooCoarse { site: v, angle });
                }
                for (a, xa) in x.iter().enumerate() {
                    field.set(v, mu, nu, a, xa / (h[mu] * h[nu]));
                }
            }
        }
    }
    Ok(field)
}

/// {(d^∇)*F} at vertices by centered differences; flat base, abelian transport.
pub fn codifferential_f(base: &BaseLattice, curvature: &CurvatureField) -> Result<Vec<f64>, BundleError> {
    if !base.is_grid() {
        return Err(BundleError::NotGrid);
    }
    Ok(curvature.covariant_derivative().codifferential())
}

/// Plaquette holonomies of every (μ<ν) plane, site-major.
pub fn plaquette_holonomies(conn: &DiscreteConnection) -> Result<Vec<GroupElement>, BundleError> {
    let base = conn.base();
    if !base.is_grid() {
        return Err(BundleError::NotGrid);
    }
    let n = base.dims();
    let mut out = Vec::new();
    for v in 0..base.n_vertices() {
        for mu in 0..n {
            for nu in (mu + 1)..n {
                out.push(conn.plaquette(v, mu, nu));
            }
        }
    }
    Ok(out)
}
