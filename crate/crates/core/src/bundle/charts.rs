//! Closed-form chart metrics and a finite-difference Ricci tensor.

use nalgebra::{DMatrix, UnitQuaternion, Vector3};

use super::BundleError;
use crate::group_rep::su2_exp;

type Metric<'a> = dyn Fn(&[f64]) -> DMatrix<f64> + 'a;

fn christoffel(metric: &Metric, x: &[f64], h: f64) -> Result<Vec<f64>, BundleError> {
    let n = x.len();
    let g = metric(x);
    let ginv = g.clone().try_inverse().ok_or(BundleError::SingularMetric)?;
    let mut dg = vec![DMatrix::zeros(n, n); n];
    let mut xp = x.to_vec();
    for c in 0..n {
        xp[c] = x[c] + h;
        let gp = metric(&xp);
        xp[c] = x[c] - h;
        let gm = metric(&xp);
        xp[c] = x[c];
        dg[c] = (gp - gm) / (2.0 * h);
    }
    // Γ^k_ij at (k·n + i)·n + j
    let mut gamma = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gamma[(k * n + i) * n + j] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// Ricci tensor in chart coordinates by centered differences of the metric
/// and then of the Christoffel symbols; O(step²) accurate.
pub fn ricci_fd_oracle(metric: &Metric, point: &[f64], step: f64) -> Result<DMatrix<f64>, BundleError> {
    let n = point.len();
    let g0 = christoffel(metric, point, step)?;
    let mut dgam = vec![vec![0.0; n * n * n]; n];
    let mut xp = point.to_vec();
    for c in 0..n {
        xp[c] = point[c] + step;
        let p = christoffel(metric, &xp, step)?;
        xp[c] = point[c] - step;
        let m = christoffel(metric, &xp, step)?;
        xp[c] = point[c];
        for t in 0..n * n * n {
            dgam[c][t] = (p[t] - m[t]) / (2.0 * step);
        }
    }
    let gi = |k: usize, i: usize, j: usize| g0[(k * n + i) * n + j];
    let mut ric = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += dgam[k][(k * n + i) * n + j] - dgam[j][(k * n + i) * n + k];
                for l in 0..n {
                    s += gi(k, k, l) * gi(l, i, j) - gi(k, j, l) * gi(l, i, k);
                }
            }
            ric[(i, j)] = s;
        }
    }
    Ok(ric)
}

/// Components in a frame whose vectors are the rows of `frame`.
pub fn ricci_in_frame(ric: &DMatrix<f64>, frame: &DMatrix<f64>) -> DMatrix<f64> {
    frame * ric * frame.transpose()
}

/// dx² + dy² + σ(dθ − a(x)dy)² on coordinates (x, y, θ).
///
/// This is the metric of a U(1) bundle over the flat plane with connection
/// form dθ − a(x)dy, so F_{12} = −a′(x).
pub fn abelian_chart<A: Fn(f64) -> f64>(a: A, sigma: f64) -> impl Fn(&[f64]) -> DMatrix<f64> {
    move |p: &[f64]| {
        let ax = a(p[0]);
        DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0 + sigma * ax * ax, -sigma * ax, 0.0, -sigma * ax, sigma])
    }
}

/// Rows (∂̂_1, ∂̂_2, e^♯) = (∂_x, ∂_y + a∂_θ, ∂_θ) at x.
pub fn abelian_frame(a_x: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, a_x, 0.0, 0.0, 1.0])
}

/// Bi-invariant metric (σ = δ in the basis e_a = unit/2) on SU(2) in zyz
/// Euler coordinates (φ, θ, ψ): dφ² + dθ² + dψ² + 2cosθ dφ dψ.
pub fn su2_euler_chart() -> impl Fn(&[f64]) -> DMatrix<f64> {
    |p: &[f64]| {
        let c = p[1].cos();
        DMatrix::from_row_slice(3, 3, &[1.0, 0.0, c, 0.0, 1.0, 0.0, c, 0.0, 1.0])
    }
}

fn ad_inverse(q: nalgebra::Quaternion<f64>) -> nalgebra::Matrix3<f64> {
    UnitQuaternion::from_quaternion(q).inverse().to_rotation_matrix().into_inner()
}

/// Rows e_1^♯, e_2^♯, e_3^♯ (left-invariant fields) in Euler coordinates.
///
/// The Maurer–Cartan form g⁻¹dg has columns Ad(h⁻¹)ê₃, Ad(exp(ψe₃)⁻¹)ê₂, ê₃
/// with h = exp(θe₂)exp(ψe₃); the frame is its inverse transpose.
pub fn su2_euler_frame(p: &[f64]) -> DMatrix<f64> {
    let (theta, psi) = (p[1], p[2]);
    let h = su2_exp(&[0.0, theta, 0.0]) * su2_exp(&[0.0, 0.0, psi]);
    let e2 = Vector3::new(0.0, 1.0, 0.0);
    let e3 = Vector3::new(0.0, 0.0, 1.0);
    let c1 = ad_inverse(h) * e3;
    let c2 = ad_inverse(su2_exp(&[0.0, 0.0, psi])) * e2;
    let coframe = DMatrix::from_columns(&[
        nalgebra::DVector::from_column_slice(c1.as_slice()),
        nalgebra::DVector::from_column_slice(c2.as_slice()),
        nalgebra::DVector::from_column_slice(e3.as_slice()),
    ]);
    coframe.try_inverse().expect("Euler chart away from θ ∈ {0, π}").transpose()
}

/// Round 2-sphere of radius r in (θ, φ).
pub fn sphere_chart(r: f64) -> impl Fn(&[f64]) -> DMatrix<f64> {
    move |p: &[f64]| DMatrix::from_row_slice(2, 2, &[r * r, 0.0, 0.0, r * r * p[0].sin().powi(2)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_chart_has_zero_ricci() {
        let flat = |_: &[f64]| DMatrix::<f64>::identity(3, 3);
        let r = ricci_fd_oracle(&flat, &[0.1, 0.2, 0.3], 1e-3).unwrap();
        assert!(r.amax() < 1e-12);
    }

    #[test]
    fn sphere_ricci_is_g_over_r_squared() {
        let r = 1.7;
        let chart = sphere_chart(r);
        let p = [0.9, 0.4];
        let ric = ricci_fd_oracle(&chart, &p, 2e-4).unwrap();
        let expected = chart(&p) / (r * r);
        let e = (ric - expected).amax();
        assert!(e < 1e-6, "{e}");
    }

    #[test]
    fn euler_frame_is_orthonormal() {
        let chart = su2_euler_chart();
        let p = [0.3, 1.1, -0.4];
        let e = su2_euler_frame(&p);
        let gram = &e * chart(&p) * e.transpose();
        assert!((gram - DMatrix::identity(3, 3)).amax() < 1e-12);
    }

    // F_12 = −a′, (d*F)_2 = a″
    fn blocks_for(da: f64, dda: f64, sigma: f64) -> DMatrix<f64> {
        let u1 = crate::group_rep::CompactGroupModel::u1(8, sigma).unwrap();
        let f = [0.0, -da, da, 0.0];
        let dstar = [0.0, dda];
        crate::bundle::ricci_blocks_at(&f, &dstar, u1.lie().unwrap(), &DMatrix::zeros(2, 2))
    }

    #[test]
    fn heisenberg_chart_matches_blocks() {
        let (b, sigma) = (0.7, 1.3);
        let chart = abelian_chart(|x| b * x, sigma);
        let p = [0.4, -0.2, 0.9];
        let ric = ricci_fd_oracle(&chart, &p, 2e-4).unwrap();
        let framed = ricci_in_frame(&ric, &abelian_frame(b * p[0]));
        let expected = blocks_for(b, 0.0, sigma);
        let e = (framed - expected).amax();
        assert!(e < 1e-6, "{e}");
    }

    #[test]
    fn sine_chart_mixed_block() {
        let sigma = 0.8;
        let chart = abelian_chart(f64::sin, sigma);
        for x in [0.3, 1.2, 2.5] {
            let p = [x, 0.1, 0.0];
            let ric = ricci_fd_oracle(&chart, &p, 2e-4).unwrap();
            let framed = ricci_in_frame(&ric, &abelian_frame(x.sin()));
            let expected = blocks_for(x.cos(), -x.sin(), sigma);
            let e = (framed - expected).amax();
            assert!(e < 1e-6, "x={x} {e}");
        }
    }

    #[test]
    fn su2_chart_is_half_identity() {
        let chart = su2_euler_chart();
        let p = [0.3, 1.1, -0.4];
        let ric = ricci_fd_oracle(&chart, &p, 2e-4).unwrap();
        let framed = ricci_in_frame(&ric, &su2_euler_frame(&p));
        let e = (framed - DMatrix::identity(3, 3) * 0.5).amax();
        assert!(e < 1e-6, "{e}");
    }
}
