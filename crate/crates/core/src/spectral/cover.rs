//! Finite principal bundles as voltage covers and the isotypic decomposition
//! of their Laplacians.

use nalgebra::{DMatrix, DVector};

use super::{connection_laplacian, eigs, Domain, Spectrum, SpectralError, SymmetricOperator};
use crate::bundle::DiscreteConnection;
use crate::group_rep::{commutant_dim, real_irreps, CompactGroupModel, GroupElement, RepresentationModel};
use crate::linalg::CsrMatrix;
use crate::mm_space::{FiniteMMSpace, IsometricAction, PointMap};

/// Cover edge between vertex indices `x·|G| + γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverEdge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
    pub vertical: bool,
}

/// P = X × G with horizontal edges (x, γ) ~ (y, U_xy⁻¹γ) over each base edge
/// and vertical edges (x, γ) ~ (x, γs) for s in the group's generating set;
/// G acts freely on the right by (x, γ)·δ = (x, γδ).
#[derive(Debug, Clone, PartialEq)]
pub struct CoverSpace {
    pub base_vertices: usize,
    pub group: CompactGroupModel,
    pub edges: Vec<CoverEdge>,
    /// Mass of (x, γ) is the base mass of x.
    pub mass: Vec<f64>,
    /// Hop metric using both edge kinds.
    pub space: FiniteMMSpace,
    pub action: IsometricAction,
    pub projection: PointMap,
}

impl CoverSpace {
    pub fn n_vertices(&self) -> usize {
        self.mass.len()
    }

    pub fn index(&self, x: usize, g: usize) -> usize {
        x * self.group.len() + g
    }

    /// Number of connected components of the horizontal graph.
    pub fn horizontal_components(&self) -> usize {
        let n = self.n_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        for e in self.edges.iter().filter(|e| !e.vertical) {
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            parent[a] = b;
        }
        (0..n).filter(|&a| find(&mut parent, a) == a).count()
    }
}

fn check_generators(group: &CompactGroupModel) -> Result<&[usize], SpectralError> {
    let table = group.table().ok_or(SpectralError::NeedsFiniteGroup)?;
    let s = group.generators();
    let closure = table.conjugation_closure(s);
    if closure != {
        let mut v = s.to_vec();
        v.sort_unstable();
        v
    } {
        return Err(SpectralError::BadGenerators("fiber generating set must be symmetric and conjugation closed".into()));
    }
    Ok(s)
}

pub fn voltage_cover(conn: &DiscreteConnection) -> Result<CoverSpace, SpectralError> {
    let group = conn.group().clone();
    let table = group.table().ok_or(SpectralError::NeedsFiniteGroup)?.clone();
    let gens = check_generators(&group)?.to_vec();
    let base = conn.base();
    let order = group.len();
    let nx = base.n_vertices();
    let mut edges = Vec::new();
    for (e, be) in base.edges().iter().enumerate() {
        let u = match conn.link(e) {
            GroupElement::Index(i) => i,
            _ => return Err(SpectralError::NeedsFiniteGroup),
        };
        let uinv = table.inverse(u);
        for g in 0..order {
            edges.push(CoverEdge { from: be.from * order + g, to: be.to * order + table.mul(uinv, g), weight: be.weight, vertical: false });
        }
    }
    for x in 0..nx {
        for g in 0..order {
            for &s in &gens {
                let h = table.mul(g, s);
                // one unordered edge per pair {γ, γs}
                if g <= h {
                    continue;
                }
                edges.push(CoverEdge { from: x * order + g, to: x * order + h, weight: 1.0, vertical: true });
            }
        }
    }
    let n = nx * order;
    let hop: Vec<(usize, usize, f64)> = edges.iter().map(|e| (e.from, e.to, 1.0)).collect();
    let space = FiniteMMSpace::from_graph(n, &hop)?;
    let perms: Vec<Vec<usize>> = (0..order).map(|d| (0..n).map(|v| (v / order) * order + table.mul(v % order, d)).collect()).collect();
    let action = IsometricAction::new(group.clone(), perms)?;
    let base_hop: Vec<(usize, usize, f64)> = base.edges().iter().map(|e| (e.from, e.to, 1.0)).collect();
    let base_space = if nx == 1 {
        FiniteMMSpace::new(DMatrix::zeros(1, 1), vec![1.0])?
    } else {
        FiniteMMSpace::from_graph(nx, &base_hop)?
    };
    let base_space = base_space.with_measure(base.vertex_mass().to_vec())?;
    let projection = PointMap::new(space.clone(), base_space, (0..n).map(|v| v / order).collect())?;
    let mass = (0..n).map(|v| base.vertex_mass()[v / order]).collect();
    Ok(CoverSpace { base_vertices: nx, group, edges, mass, space, action, projection })
}

/// Graph Laplacian of P with horizontal weights from the base and vertical
/// weight `fiber_weight` (times the vertex mass, so that M⁻¹K splits into
/// horizontal plus fiber parts).
pub fn total_laplacian(cover: &CoverSpace, fiber_weight: f64) -> Result<SymmetricOperator, SpectralError> {
    let mut t = Vec::with_capacity(4 * cover.edges.len());
    for e in &cover.edges {
        let w = if e.vertical { fiber_weight * cover.mass[e.from] } else { e.weight };
        t.push((e.from, e.from, w));
        t.push((e.to, e.to, w));
        t.push((e.from, e.to, -w));
        t.push((e.to, e.from, -w));
    }
    let matrix = CsrMatrix::from_triplets(cover.n_vertices(), &t);
    SymmetricOperator::new(matrix, cover.mass.clone(), Domain::Total { group_order: cover.group.len() })
}

/// Eigenvalue of the weighted fiber Cayley Laplacian on the ρ-isotypic part of
/// L²(G): w·(|S| − Σ_s tr ρ(s)/dim V).
pub fn chi_discrete(group: &CompactGroupModel, rep: &RepresentationModel, fiber_weight: f64) -> Result<f64, SpectralError> {
    let s = check_generators(group)?;
    let d = rep.dim() as f64;
    let tr: f64 = s.iter().map(|&g| rep.character(&group.element(g))).sum();
    Ok(fiber_weight * (s.len() as f64 - tr / d))
}

/// Orthonormal basis of (functions ⊗ V)^G, one block per orbit: F(u₀γ) =
/// ρ(γ)⁻¹v for v in the fixed space of the stabilizer of u₀. Index `u·dim V + a`.
pub fn isotypic_basis(action: &IsometricAction, rep: &RepresentationModel) -> DMatrix<f64> {
    let group = action.group();
    let d = rep.dim();
    let n = action.n_points();
    let rhos = rep.matrices_on(group);
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for orbit in action.orbits() {
        let u0 = orbit[0];
        let stab = action.stabilizer(u0);
        let mut avg = DMatrix::zeros(d, d);
        for &h in &stab {
            avg += &rhos[h];
        }
        avg /= stab.len() as f64;
        let eig = nalgebra::SymmetricEigen::new((&avg + avg.transpose()) * 0.5);
        let mut fixed: Vec<usize> = (0..d).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
        fixed.sort_unstable();
        // one representative element per orbit point
        let mut reach = vec![None; n];
        for g in 0..group.len() {
            let v = action.apply(u0, g);
            if reach[v].is_none() {
                reach[v] = Some(g);
            }
        }
        let scale = 1.0 / (orbit.len() as f64).sqrt();
        for i in fixed {
            let v = eig.eigenvectors.column(i).into_owned();
            let mut col = DVector::zeros(n * d);
            for &u in &orbit {
                let g = reach[u].expect("orbit point");
                let fu = rhos[g].transpose() * &v * scale;
                col.rows_mut(u * d, d).copy_from(&fu);
            }
            cols.push(col);
        }
    }
    if cols.is_empty() {
        DMatrix::zeros(n * d, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Restriction of op ⊗ id_V to the G-equivariant subspace, with the basis used.
pub fn isotypic_restriction(
    op: &SymmetricOperator,
    action: &IsometricAction,
    rep: &RepresentationModel,
) -> Result<(SymmetricOperator, DMatrix<f64>), SpectralError> {
    if action.n_points() != op.dim() {
        return Err(SpectralError::DimensionMismatch("action and operator sizes differ".into()));
    }
    let defect = op.commutation_defect(action.perms(), 1);
    if defect > 1e-9 {
        return Err(SpectralError::NotEquivariant(defect));
    }
    let d = rep.dim();
    let q = isotypic_basis(action, rep);
    let mut t = Vec::new();
    for i in 0..op.dim() {
        for (j, v) in op.matrix().row(i) {
            for a in 0..d {
                t.push((i * d + a, j * d + a, v));
            }
        }
    }
    let big = CsrMatrix::from_triplets(op.dim() * d, &t);
    let k = big.project(&q);
    let r = q.ncols();
    let mut trips = Vec::new();
    for i in 0..r {
        for j in 0..r {
            if k[(i, j)] != 0.0 {
                trips.push((i, j, k[(i, j)]));
            }
        }
    }
    // columns live on single orbits, where the mass is constant
    let mass = (0..r)
        .map(|c| {
            let row = q.column(c).iter().position(|x| *x != 0.0).unwrap_or(0);
            op.mass()[row / d]
        })
        .collect();
    let out = SymmetricOperator::new(
        CsrMatrix::from_triplets(r, &trips),
        mass,
        Domain::Isotypic { rep: rep.name().to_string(), dim: d },
    )?;
    Ok((out, q))
}

/// max_j |λ_j^iso − (λ_j^conn + χ)|.
pub fn verify_shift(iso: &Spectrum, conn: &Spectrum, chi: f64) -> Result<f64, SpectralError> {
    if iso.len() != conn.len() {
        return Err(SpectralError::CountMismatch(iso.len(), conn.len()));
    }
    Ok(iso.values.iter().zip(&conn.values).map(|(a, b)| (a - (b + chi)).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorReport {
    pub rep: String,
    pub dim: usize,
    pub commutant: usize,
    pub chi: f64,
    /// Copies of this sector in the total spectrum: dim V / dim End_G(V).
    pub copies: usize,
    pub connection: Vec<f64>,
    pub isotypic: Vec<f64>,
    pub shift_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverDecomposition {
    pub total: Vec<f64>,
    pub sectors: Vec<SectorReport>,
    /// max gap between spectrum(Δ_P) and the union of shifted sector spectra.
    pub gap: f64,
}

/// Full spectrum of the total Laplacian against every real irrep sector.
pub fn cover_decomposition(conn: &DiscreteConnection, fiber_weight: f64) -> Result<CoverDecomposition, SpectralError> {
    let cover = voltage_cover(conn)?;
    let total_op = total_laplacian(&cover, fiber_weight)?;
    let total = eigs(&total_op, total_op.dim())?.values;
    let mut union = Vec::with_capacity(total.len());
    let mut sectors = Vec::new();
    for rep in real_irreps(conn.group())? {
        let commutant = commutant_dim(conn.group(), &rep).round() as usize;
        let copies = rep.dim() / commutant;
        let chi = chi_discrete(conn.group(), &rep, fiber_weight)?;
        let lc = connection_laplacian(conn, &rep)?;
        let cs = eigs(&lc, lc.dim())?;
        let (iso, _) = isotypic_restriction(&total_op, &cover.action, &rep)?;
        let is = eigs(&iso, iso.dim())?;
        let shift_gap = verify_shift(&is, &cs, chi)?;
        for _ in 0..copies {
            union.extend(cs.values.iter().map(|v| v + chi));
        }
        sectors.push(SectorReport {
            rep: rep.name().to_string(),
            dim: rep.dim(),
            commutant,
            chi,
            copies,
            connection: cs.values,
            isotypic: is.values,
            shift_gap,
        });
    }
    if union.len() != total.len() {
        return Err(SpectralError::CountMismatch(union.len(), total.len()));
    }
    union.sort_by(f64::total_cmp);
    let gap = total.iter().zip(&union).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(CoverDecomposition { total, sectors, gap })
}
