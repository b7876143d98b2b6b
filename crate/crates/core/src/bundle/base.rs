//! Base spaces: flat torus grids and weighted graphs.

use super::BundleError;

#[derive(Debug, Clone, PartialEq)]
pub enum BaseKind {
    /// Periodic grid with `sizes[μ]` vertices over period `lengths[μ]`.
    TorusGrid { sizes: Vec<usize>, lengths: Vec<f64> },
    Graph,
}

/// Undirected edge stored with an orientation `from → to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseEdge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
    /// Grid direction μ for torus grids.
    pub direction: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseLattice {
    kind: BaseKind,
    n_vertices: usize,
    edges: Vec<BaseEdge>,
    /// Inner-product weight per vertex (cell volume on grids, 1 on graphs).
    vertex_mass: Vec<f64>,
}

impl BaseLattice {
    /// Flat torus grid. Edge weights are cellvol/h_μ² and vertex masses the cell
    /// volume, so the weighted operator is the standard centered stencil.
    ///
    /// Edge `v·dims + μ` joins `v` to `v + e_μ`. An empty `sizes` is a point.
    pub fn torus_grid(sizes: &[usize], lengths: &[f64]) -> Result<Self, BundleError> {
        if sizes.len() != lengths.len() {
            return Err(BundleError::InvalidBase("sizes and lengths differ in length".into()));
        }
        if sizes.iter().any(|&m| m < 2) || lengths.iter().any(|&l| !(l > 0.0)) {
            return Err(BundleError::InvalidBase("grid needs ≥ 2 vertices and positive length per axis".into()));
        }
        let n: usize = sizes.iter().product();
        let spacing: Vec<f64> = lengths.iter().zip(sizes).map(|(l, &m)| l / m as f64).collect();
        let cell: f64 = spacing.iter().product();
        let mut base = Self {
            kind: BaseKind::TorusGrid { sizes: sizes.to_vec(), lengths: lengths.to_vec() },
            n_vertices: n,
            edges: Vec::with_capacity(n * sizes.len()),
            vertex_mass: vec![cell; n],
        };
        for v in 0..n {
            for (mu, h) in spacing.iter().enumerate() {
                let to = base.shift(v, mu, 1);
                base.edges.push(BaseEdge { from: v, to, weight: cell / (h * h), direction: Some(mu) });
            }
        }
        Ok(base)
    }

    /// Weighted graph; must be connected with positive weights.
    pub fn graph(n_vertices: usize, edges: &[(usize, usize, f64)]) -> Result<Self, BundleError> {
        if n_vertices == 0 {
            return Err(BundleError::InvalidBase("graph needs a vertex".into()));
        }
        let mut list = Vec::with_capacity(edges.len());
        for &(a, b, w) in edges {
            if a >= n_vertices || b >= n_vertices || a == b || !(w > 0.0) {
                return Err(BundleError::InvalidBase(format!("bad edge ({a},{b},{w})")));
            }
            list.push(BaseEdge { from: a, to: b, weight: w, direction: None });
        }
        let base = Self { kind: BaseKind::Graph, n_vertices, edges: list, vertex_mass: vec![1.0; n_vertices] };
        if !base.is_connected() {
            return Err(BundleError::Disconnected);
        }
        Ok(base)
    }

    /// Cycle graph C_m with unit weights; edge j joins j to j+1.
    pub fn cycle(m: usize) -> Result<Self, BundleError> {
        if m < 3 {
            return Err(BundleError::InvalidBase("cycle needs at least 3 vertices".into()));
        }
        let edges: Vec<_> = (0..m).map(|j| (j, (j + 1) % m, 1.0)).collect();
        Self::graph(m, &edges)
    }

    pub fn kind(&self) -> &BaseKind {
        &self.kind
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.kind, BaseKind::TorusGrid { .. })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[BaseEdge] {
        &self.edges
    }

    pub fn vertex_mass(&self) -> &[f64] {
        &self.vertex_mass
    }

    /// Grid dimension (0 for graphs).
    pub fn dims(&self) -> usize {
        match &self.kind {
            BaseKind::TorusGrid { sizes, .. } => sizes.len(),
            BaseKind::Graph => 0,
        }
    }

    pub fn sizes(&self) -> &[usize] {
        match &self.kind {
            BaseKind::TorusGrid { sizes, .. } => sizes,
            BaseKind::Graph => &[],
        }
    }

    pub fn lengths(&self) -> &[f64] {
        match &self.kind {
            BaseKind::TorusGrid { lengths, .. } => lengths,
            BaseKind::Graph => &[],
        }
    }

    pub fn spacing(&self) -> Vec<f64> {
        self.lengths().iter().zip(self.sizes()).map(|(l, &m)| l / m as f64).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    /// Total volume Σ mass.
    pub fn volume(&self) -> f64 {
        self.vertex_mass.iter().sum()
    }

    /// Row-major multi-index of a grid vertex (last axis fastest).
    pub fn multi_index(&self, mut v: usize) -> Vec<usize> {
        let sizes = self.sizes();
        let mut idx = vec![0; sizes.len()];
        for mu in (0..sizes.len()).rev() {
            idx[mu] = v % sizes[mu];
            v /= sizes[mu];
        }
        idx
    }

    pub fn vertex_index(&self, idx: &[usize]) -> usize {
        self.sizes().iter().zip(idx).fold(0, |acc, (&m, &i)| acc * m + (i % m))
    }

    /// Grid vertex shifted by `steps` along axis μ, periodically.
    pub fn shift(&self, v: usize, mu: usize, steps: isize) -> usize {
        let sizes = self.sizes();
        let mut idx = self.multi_index(v);
        let m = sizes[mu] as isize;
        idx[mu] = ((idx[mu] as isize + steps).rem_euclid(m)) as usize;
        self.vertex_index(&idx)
    }

    /// Physical coordinates x^μ = i_μ·h_μ of a grid vertex.
    pub fn coordinates(&self, v: usize) -> Vec<f64> {
        let h = self.spacing();
        self.multi_index(v).iter().zip(&h).map(|(&i, h)| i as f64 * h).collect()
    }

    /// Index of the forward edge v → v + e_μ on a grid.
    pub fn grid_edge(&self, v: usize, mu: usize) -> usize {
        v * self.dims() + mu
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_vertices;
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}
