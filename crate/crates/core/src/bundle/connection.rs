//! Link variables on the edges of a base lattice.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::base::BaseLattice;
use super::BundleError;
use crate::group_rep::json::{element_from_json, element_to_json};
use crate::group_rep::{CompactGroupModel, GroupElement, GroupKind};

/// A connection as one group element per base edge.
///
/// For an edge stored as `(x, y)` the link is `U_xy`, the transport of the
/// fiber over `y` to the fiber over `x`; the reversed edge carries `U_xy⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteConnection {
    base: BaseLattice,
    group: CompactGroupModel,
    links: Vec<GroupElement>,
}

impl DiscreteConnection {
    pub fn new(base: BaseLattice, group: CompactGroupModel, links: Vec<GroupElement>) -> Result<Self, BundleError> {
        if links.len() != base.edges().len() {
            return Err(BundleError::DimensionMismatch(format!(
                "{} links for {} edges",
                links.len(),
                base.edges().len()
            )));
        }
        for g in &links {
            let ok = matches!(
                (g, group.kind()),
                (GroupElement::Index(_), GroupKind::Finite)
                    | (GroupElement::Angle(_), GroupKind::U1)
                    | (GroupElement::Quaternion(_), GroupKind::Su2)
            );
            if !ok {
                return Err(BundleError::DimensionMismatch("link encoding does not match the group".into()));
            }
            if let GroupElement::Index(i) = g {
                if *i >= group.len() {
                    return Err(BundleError::DimensionMismatch("link index out of range".into()));
                }
            }
        }
        Ok(Self { base, group, links })
    }

    pub fn trivial(base: BaseLattice, group: CompactGroupModel) -> Self {
        let id = group.identity();
        let links = vec![id; base.edges().len()];
        Self { base, group, links }
    }

    /// Links from a gauge field `a(x, μ)` (Lie coordinates) sampled at edge
    /// midpoints: `U_{x,x+e_μ} = exp(h_μ A_μ(x + h_μ e_μ/2))`.
    pub fn from_gauge_field<F>(base: BaseLattice, group: CompactGroupModel, a: F) -> Result<Self, BundleError>
    where
        F: Fn(&[f64], usize) -> Vec<f64>,
    {
        if !base.is_grid() {
            return Err(BundleError::NotGrid);
        }
        let h = base.spacing();
        let mut links = Vec::with_capacity(base.edges().len());
        for e in base.edges() {
            let mu = e.direction.expect("grid edge");
            let mut mid = base.coordinates(e.from);
            mid[mu] += 0.5 * h[mu];
            let x: Vec<f64> = a(&mid, mu).iter().map(|v| v * h[mu]).collect();
            links.push(group.exp(&x)?);
        }
        Self::new(base, group, links)
    }

    pub fn base(&self) -> &BaseLattice {
        &self.base
    }

    pub fn group(&self) -> &CompactGroupModel {
        &self.group
    }

    pub fn links(&self) -> &[GroupElement] {
        &self.links
    }

    /// U along edge `e` in its stored orientation.
    pub fn link(&self, e: usize) -> GroupElement {
        self.links[e]
    }

    /// U_{v, v+e_μ} on a grid.
    pub fn grid_link(&self, v: usize, mu: usize) -> GroupElement {
        self.links[self.base.grid_edge(v, mu)]
    }

    /// U_{x,x+μ} U_{x+μ,x+μ+ν} U_{x+μ+ν,x+ν} U_{x+ν,x} for the plaquette at `v`.
    pub fn plaquette(&self, v: usize, mu: usize, nu: usize) -> GroupElement {
        let g = &self.group;
        let b = &self.base;
        let v_mu = b.shift(v, mu, 1);
        let v_nu = b.shift(v, nu, 1);
        let a = g.multiply(&self.grid_link(v, mu), &self.grid_link(v_mu, nu));
        let c = g.multiply(&g.inverse(&self.grid_link(v_nu, mu)), &g.inverse(&self.grid_link(v, nu)));
        g.multiply(&a, &c)
    }

    /// Holonomy U_{x0 x1} U_{x1 x2} ⋯ around a closed vertex path of a graph.
    pub fn holonomy(&self, path: &[usize]) -> Result<GroupElement, BundleError> {
        let g = &self.group;
        let mut acc = g.identity();
        for w in path.windows(2) {
            let (x, y) = (w[0], w[1]);
            let e = self
                .base
                .edges()
                .iter()
                .position(|e| (e.from == x && e.to == y) || (e.from == y && e.to == x))
                .ok_or_else(|| BundleError::InvalidBase(format!("no edge between {x} and {y}")))?;
            let u = if self.base.edges()[e].from == x { self.links[e] } else { g.inverse(&self.links[e]) };
            acc = g.multiply(&acc, &u);
        }
        Ok(acc)
    }

    /// U'_{xy} = γ(x)⁻¹ U_{xy} γ(y).
    pub fn gauge_transform(&self, gamma: &[GroupElement]) -> Result<Self, BundleError> {
        if gamma.len() != self.base.n_vertices() {
            return Err(BundleError::DimensionMismatch("one gauge element per vertex".into()));
        }
        let g = &self.group;
        let links = self
            .base
            .edges()
            .iter()
            .zip(&self.links)
            .map(|(e, u)| g.multiply(&g.multiply(&g.inverse(&gamma[e.from]), u), &gamma[e.to]))
            .collect();
        Self::new(self.base.clone(), self.group.clone(), links)
    }

    pub fn to_json(&self) -> Value {
        let doc = ConnectionDoc {
            edges: self.base.edges().iter().map(|e| (e.from, e.to)).collect(),
            links: self.links.iter().map(element_to_json).collect(),
        };
        serde_json::to_value(doc).expect("connection document serializes")
    }

    /// Read links for an existing base and group; edges must match in order.
    pub fn from_json(base: BaseLattice, group: CompactGroupModel, v: &Value) -> Result<Self, BundleError> {
        let doc: ConnectionDoc = serde_json::from_value(v.clone()).map_err(|e| BundleError::Document(e.to_string()))?;
        let expected: Vec<(usize, usize)> = base.edges().iter().map(|e| (e.from, e.to)).collect();
        if doc.edges != expected {
            return Err(BundleError::Document("edge list differs from the base".into()));
        }
        let links = doc
            .links
            .iter()
            .map(|l| element_from_json(group.kind(), l))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(base, group, links)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectionDoc {
    edges: Vec<(usize, usize)>,
    links: Vec<Value>,
}

/// Uniform U(1) flux `k` on a 2-dim torus grid in Landau gauge.
///
/// With φ = 2πk/(m₁m₂): `U_y(i,j) = e^{iφi}`, `U_x(i,j) = 1` except on the
/// last column `U_x(m₁−1,j) = e^{−iφm₁j}`, which absorbs the cocycle. Every
/// plaquette holonomy is then e^{iφ} modulo 2π, and the total flux is 2πk.
pub fn connection_from_flux(base: &BaseLattice, group: &CompactGroupModel, k: i64) -> Result<DiscreteConnection, BundleError> {
    if base.dims() != 2 {
        return Err(BundleError::NotGrid);
    }
    if group.kind() != GroupKind::U1 {
        return Err(BundleError::Unsupported("flux connections need a U(1) group".into()));
    }
    let (m1, m2) = (base.sizes()[0], base.sizes()[1]);
    let phi = 2.0 * PI * k as f64 / (m1 * m2) as f64;
    let mut links = Vec::with_capacity(base.edges().len());
    for e in base.edges() {
        let idx = base.multi_index(e.from);
        let (i, j) = (idx[0], idx[1]);
        let angle = match e.direction {
            Some(0) if i == m1 - 1 => -phi * (m1 * j) as f64,
            Some(0) => 0.0,
            Some(_) => phi * i as f64,
            None => unreachable!(),
        };
        links.push(GroupElement::Angle(crate::group_rep::wrap_angle(angle)));
    }
    DiscreteConnection::new(base.clone(), group.clone(), links)
}
