//! Right actions of finite (or finitely sampled) groups by point permutations.

use super::{FiniteMMSpace, MmError};
use crate::group_rep::CompactGroupModel;

/// `perms[γ][u] = u·γ`, indexed by the group's element order.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometricAction {
    group: CompactGroupModel,
    perms: Vec<Vec<usize>>,
}

impl IsometricAction {
    /// Checks the permutation, identity and composition laws; the group needs
    /// a multiplication table.
    pub fn new(group: CompactGroupModel, perms: Vec<Vec<usize>>) -> Result<Self, MmError> {
        let table = group.table().ok_or(MmError::NoTable)?;
        if perms.len() != group.len() {
            return Err(MmError::InvalidAction(format!("{} permutations for {} elements", perms.len(), group.len())));
        }
        let n = perms.first().map_or(0, Vec::len);
        for (g, p) in perms.iter().enumerate() {
            let mut seen = vec![false; n];
            if p.len() != n {
                return Err(MmError::InvalidAction("permutations differ in length".into()));
            }
            for &u in p {
                if u >= n || seen[u] {
                    return Err(MmError::InvalidAction(format!("element {g} does not act as a permutation")));
                }
                seen[u] = true;
            }
        }
        let e = table.identity();
        if perms[e].iter().enumerate().any(|(u, &v)| u != v) {
            return Err(MmError::InvalidAction("identity moves a point".into()));
        }
        for a in 0..group.len() {
            for b in 0..group.len() {
                let ab = table.mul(a, b);
                if (0..n).any(|u| perms[b][perms[a][u]] != perms[ab][u]) {
                    return Err(MmError::InvalidAction(format!("(uγ_{a})γ_{b} ≠ u(γ_{a}γ_{b})")));
                }
            }
        }
        Ok(Self { group, perms })
    }

    /// The group acting on itself by right multiplication.
    pub fn regular(group: CompactGroupModel) -> Result<Self, MmError> {
        let table = group.table().ok_or(MmError::NoTable)?;
        let n = table.order();
        let perms = (0..n).map(|g| (0..n).map(|u| table.mul(u, g)).collect()).collect();
        Self::new(group, perms)
    }

    pub fn trivial(group: CompactGroupModel, n_points: usize) -> Result<Self, MmError> {
        let perms = vec![(0..n_points).collect(); group.len()];
        Self::new(group, perms)
    }

    /// Exact isometry and measure invariance on `space`.
    pub fn validate_on(&self, space: &FiniteMMSpace) -> Result<(), MmError> {
        let n = space.n_points();
        if self.n_points() != n {
            return Err(MmError::InvalidAction(format!("action on {} points, space has {n}", self.n_points())));
        }
        for (g, p) in self.perms.iter().enumerate() {
            for u in 0..n {
                if space.measure()[p[u]] != space.measure()[u] {
                    return Err(MmError::InvalidAction(format!("element {g} does not preserve the measure")));
                }
                for v in 0..n {
                    if space.dist(p[u], p[v]) != space.dist(u, v) {
                        return Err(MmError::InvalidAction(format!("element {g} is not an isometry")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &CompactGroupModel {
        &self.group
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn n_points(&self) -> usize {
        self.perms.first().map_or(0, Vec::len)
    }

    pub fn apply(&self, u: usize, g: usize) -> usize {
        self.perms[g][u]
    }

    /// Orbit of `u`, ascending.
    pub fn orbit(&self, u: usize) -> Vec<usize> {
        let mut o: Vec<usize> = self.perms.iter().map(|p| p[u]).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    /// Element indices fixing `u`.
    pub fn stabilizer(&self, u: usize) -> Vec<usize> {
        (0..self.perms.len()).filter(|&g| self.perms[g][u] == u).collect()
    }

    /// All orbits, ordered by their smallest point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.n_points();
        let mut done = vec![false; n];
        let mut out = Vec::new();
        for u in 0..n {
            if !done[u] {
                let o = self.orbit(u);
                for &v in &o {
                    done[v] = true;
                }
                out.push(o);
            }
        }
        out
    }

    pub fn is_free(&self) -> bool {
        (0..self.n_points()).all(|u| self.stabilizer(u).len() == 1)
    }
}

/// A total map between two finite spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMap {
    source: FiniteMMSpace,
    target: FiniteMMSpace,
    map: Vec<usize>,
}

impl PointMap {
    pub fn new(source: FiniteMMSpace, target: FiniteMMSpace, map: Vec<usize>) -> Result<Self, MmError> {
        if map.len() != source.n_points() {
            return Err(MmError::InvalidMap(format!("{} images for {} points", map.len(), source.n_points())));
        }
        if let Some(&bad) = map.iter().find(|&&p| p >= target.n_points()) {
            return Err(MmError::InvalidMap(format!("image {bad} outside the target")));
        }
        Ok(Self { source, target, map })
    }

    pub fn identity(space: FiniteMMSpace) -> Self {
        let map = (0..space.n_points()).collect();
        Self { source: space.clone(), target: space, map }
    }

    pub fn source(&self) -> &FiniteMMSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteMMSpace {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, u: usize) -> usize {
        self.map[u]
    }

    /// Pushforward of the source measure onto the target points.
    pub fn pushforward(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.target.n_points()];
        for (u, &p) in self.map.iter().enumerate() {
            out[p] += self.source.measure()[u];
        }
        out
    }
}
