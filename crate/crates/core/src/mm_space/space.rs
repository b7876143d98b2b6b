//! Finite metric measure spaces.

use nalgebra::DMatrix;

use super::MmError;

/// Relative slack allowed in the triangle inequality for computed metrics.
pub const TRIANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMMSpace {
    dist: DMatrix<f64>,
    measure: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl FiniteMMSpace {
    pub fn new(dist: DMatrix<f64>, measure: Vec<f64>) -> Result<Self, MmError> {
        let n = dist.nrows();
        if n == 0 || dist.ncols() != n {
            return Err(MmError::InvalidMetric("distance matrix must be square and nonempty".into()));
        }
        if measure.len() != n {
            return Err(MmError::InvalidMetric(format!("{} weights for {n} points", measure.len())));
        }
        if measure.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(MmError::InvalidMetric("weights must be finite and nonnegative".into()));
        }
        for i in 0..n {
            if dist[(i, i)] != 0.0 {
                return Err(MmError::InvalidMetric(format!("d({i},{i}) ≠ 0")));
            }
            for j in 0..n {
                let d = dist[(i, j)];
                if !d.is_finite() || d != dist[(j, i)] {
                    return Err(MmError::InvalidMetric(format!("d({i},{j}) is not symmetric and finite")));
                }
                if i != j && d <= 0.0 {
                    return Err(MmError::InvalidMetric(format!("points {i} and {j} coincide")));
                }
            }
        }
        let scale = dist.amax();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[(i, k)] > dist[(i, j)] + dist[(j, k)] + TRIANGLE_TOL * scale {
                        return Err(MmError::InvalidMetric(format!("triangle inequality fails at ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(Self { dist, measure, labels: None })
    }

    /// Shortest-path metric of a connected weighted graph, unit point masses.
    pub fn from_graph(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, MmError> {
        let mut d = DMatrix::from_element(n, n, f64::INFINITY);
        for i in 0..n {
            d[(i, i)] = 0.0;
        }
        for &(a, b, w) in edges {
            if a >= n || b >= n || a == b || !(w > 0.0) {
                return Err(MmError::InvalidMetric(format!("bad edge ({a},{b},{w})")));
            }
            if w < d[(a, b)] {
                d[(a, b)] = w;
                d[(b, a)] = w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = d[(i, k)];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let via = dik + d[(k, j)];
                    if via < d[(i, j)] {
                        d[(i, j)] = via;
                    }
                }
            }
        }
        if d.iter().any(|x| x.is_infinite()) {
            return Err(MmError::InvalidMetric("graph is not connected".into()));
        }
        Self::new(d, vec![1.0; n])
    }

    /// Cycle graph with unit edges.
    pub fn cycle(m: usize) -> Result<Self, MmError> {
        let edges: Vec<_> = (0..m).map(|i| (i, (i + 1) % m, 1.0)).collect();
        Self::from_graph(m, &edges)
    }

    pub fn with_measure(mut self, measure: Vec<f64>) -> Result<Self, MmError> {
        if measure.len() != self.n_points() || measure.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(MmError::InvalidMetric("measure does not fit the space".into()));
        }
        self.measure = measure;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MmError> {
        if labels.len() != self.n_points() {
            return Err(MmError::InvalidMetric("one label per point".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_points(&self) -> usize {
        self.measure.len()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[(i, j)]
    }

    pub fn dist_matrix(&self) -> &DMatrix<f64> {
        &self.dist
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn total_mass(&self) -> f64 {
        self.measure.iter().sum()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.amax()
    }

    /// Closed ball D(center, r), ascending.
    pub fn ball(&self, center: usize, r: f64) -> Vec<usize> {
        (0..self.n_points()).filter(|&j| self.dist[(center, j)] <= r).collect()
    }

    /// d(i, S) for a set S; +∞ for the empty set.
    pub fn dist_to_set(&self, i: usize, set: &[usize]) -> f64 {
        set.iter().map(|&j| self.dist[(i, j)]).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_metric() {
        let c = FiniteMMSpace::cycle(6).unwrap();
        assert_eq!(c.dist(0, 3), 3.0);
        assert_eq!(c.dist(1, 5), 2.0);
        assert_eq!(c.ball(0, 1.0), vec![0, 1, 5]);
        assert_eq!(c.total_mass(), 6.0);
    }

    #[test]
    fn rejects_bad_metrics() {
        let d = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0]);
        assert!(FiniteMMSpace::new(d, vec![1.0; 3]).is_err());
        let d = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.0]);
        assert!(FiniteMMSpace::new(d, vec![1.0; 2]).is_err());
        assert!(FiniteMMSpace::from_graph(3, &[(0, 1, 1.0)]).is_err());
    }
}
