//! Lowest eigenpairs of K v = λ M v.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SpectralError, SymmetricOperator};
use crate::linalg::{symmetrize, CsrMatrix, EnvelopeCholesky};

/// Relative tolerance used to group eigenvalues into degeneracy clusters.
pub const CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    Dense,
    ShiftInvertLanczos { cycles: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub start: usize,
    pub multiplicity: usize,
    pub center: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors as columns, in the operator's coordinates.
    pub vectors: Option<DMatrix<f64>>,
    /// ‖Sy − λy‖ with S = M^{-1/2}KM^{-1/2} and y the normalized vector.
    pub residuals: Vec<f64>,
    pub method: SolverMethod,
    /// ‖S‖_∞, the scale for residuals.
    pub norm: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Consecutive eigenvalues within rel·max(1, |λ|) of each other.
    pub fn clusters(&self, rel: f64) -> Vec<Cluster> {
        let mut out: Vec<Cluster> = Vec::new();
        for (i, &v) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some(c) if (v - self.values[i - 1]).abs() <= rel * v.abs().max(1.0) => c.multiplicity += 1,
                _ => out.push(Cluster { start: i, multiplicity: 1, center: v }),
            }
        }
        for c in &mut out {
            c.center = self.values[c.start..c.start + c.multiplicity].iter().sum::<f64>() / c.multiplicity as f64;
        }
        out
    }

    pub fn vector(&self, j: usize) -> Option<DVector<f64>> {
        self.vectors.as_ref().map(|v| v.column(j).into_owned())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigsOptions {
    pub seed: u64,
    pub vectors: bool,
    /// Dense solver at or below this dimension.
    pub dense_limit: usize,
    /// Convergence when every residual ≤ tol·‖S‖.
    pub tol: f64,
    pub max_cycles: usize,
    /// Krylov blocks per restart cycle.
    pub blocks: usize,
}

impl Default for EigsOptions {
    fn default() -> Self {
        Self { seed: 0x5eed, vectors: true, dense_limit: 2000, tol: 1e-10, max_cycles: 60, blocks: 8 }
    }
}

pub fn eigs(op: &SymmetricOperator, count: usize) -> Result<Spectrum, SpectralError> {
    eigs_with(op, count, &EigsOptions::default())
}

pub fn eigs_with(op: &SymmetricOperator, count: usize, opts: &EigsOptions) -> Result<Spectrum, SpectralError> {
    let n = op.dim();
    if count > n {
        return Err(SpectralError::CountTooLarge { count, dim: n });
    }
    let s = op.normalized();
    let norm = s.norm_inf().max(f64::MIN_POSITIVE);
    let (values, y, method) = if n <= opts.dense_limit {
        let (v, y) = dense_lowest(&s, count);
        (v, y, SolverMethod::Dense)
    } else {
        lanczos_lowest(&s, count, opts, norm)?
    };
    let residuals = residuals(&s, &values, &y);
    let vectors = opts.vectors.then(|| {
        let mut v = y;
        for (i, m) in op.mass().iter().enumerate() {
            let f = 1.0 / m.sqrt();
            v.row_mut(i).scale_mut(f);
        }
        v
    });
    Ok(Spectrum { values, vectors, residuals, method, norm })
}

fn residuals(s: &CsrMatrix, values: &[f64], y: &DMatrix<f64>) -> Vec<f64> {
    let sy = s.mul_dense(y);
    values.iter().enumerate().map(|(j, &l)| (sy.column(j) - y.column(j) * l).norm()).collect()
}

fn dense_lowest(s: &CsrMatrix, count: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = s.dim();
    if n == 0 || count == 0 {
        return (vec![], DMatrix::zeros(n, 0));
    }
    let mut a = s.to_dense();
    symmetrize(&mut a);
    let eig = SymmetricEigen::new(a);
    sorted_lowest(&eig, count)
}

fn sorted_lowest(eig: &SymmetricEigen<f64, nalgebra::Dyn>, count: usize) -> (Vec<f64>, DMatrix<f64>) {
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = idx[..count].iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<DVector<f64>> = idx[..count].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (values, DMatrix::from_columns(&cols))
}

/// Two passes of classical Gram–Schmidt of `w` against `basis`, then
/// orthonormalization within `w`; columns that vanish are dropped.
fn orthonormalize_against(basis: &[DVector<f64>], w: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(w.len());
    for mut v in w {
        let start = v.norm();
        for _ in 0..2 {
            for q in basis.iter().chain(out.iter()) {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let nv = v.norm();
        if nv > 1e-10 * start.max(f64::MIN_POSITIVE) {
            out.push(v / nv);
        }
    }
    out
}

fn lanczos_lowest(
    s: &CsrMatrix,
    count: usize,
    opts: &EigsOptions,
    norm: f64,
) -> Result<(Vec<f64>, DMatrix<f64>, SolverMethod), SpectralError> {
    let n = s.dim();
    let mean_diag = s.diagonal().iter().map(|d| d.abs()).sum::<f64>() / n as f64;
    // small positive shift; grown tenfold while S + shift·I is not positive definite
    let mut shift = 1e-4 * mean_diag.max(f64::MIN_POSITIVE);
    let chol = loop {
        match EnvelopeCholesky::factor(&s.add_diagonal(shift)) {
            Ok(c) => break c,
            Err(_) if shift < 1e12 * norm => shift *= 10.0,
            Err(e) => return Err(SpectralError::Factorization(e.to_string())),
        }
    };
    let guard = (count / 2).max(8);
    let p = (count + guard).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start: Vec<DVector<f64>> = (0..p).map(|_| DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5)).collect();
    let mut x = orthonormalize_against(&[], start);
    let mut worst = f64::INFINITY;
    for cycle in 1..=opts.max_cycles {
        // start from T·X so every basis vector has its stiff components damped
        let tx: Vec<DVector<f64>> = x.iter().map(|q| DVector::from_vec(chol.solve(q.as_slice()))).collect();
        let mut block = orthonormalize_against(&[], tx);
        let mut basis = block.clone();
        for _ in 1..opts.blocks {
            if basis.len() + block.len() > n {
                break;
            }
            let w: Vec<DVector<f64>> = block.iter().map(|q| DVector::from_vec(chol.solve(q.as_slice()))).collect();
            block = orthonormalize_against(&basis, w);
            if block.is_empty() {
                break;
            }
            basis.extend(block.iter().cloned());
        }
        let q = DMatrix::from_columns(&basis);
        let h = s.project(&q);
        let eig = SymmetricEigen::new(h);
        let k = p.min(basis.len());
        let (theta, v) = sorted_lowest(&eig, k);
        let y = &q * v;
        let res = residuals(s, &theta[..count], &y.columns(0, count).into_owned());
        worst = res.iter().copied().fold(0.0, f64::max);
        if worst <= opts.tol * norm {
            let values = theta[..count].to_vec();
            return Ok((values, y.columns(0, count).into_owned(), SolverMethod::ShiftInvertLanczos { cycles: cycle }));
        }
        x = (0..k).map(|j| y.column(j).into_owned()).collect();
    }
    Err(SpectralError::NoConvergence { cycles: opts.max_cycles, residual: worst })
}
