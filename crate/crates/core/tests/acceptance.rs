//! Acceptance suite. Each test prints one PASS/FAIL line with the measured
//! value next to its pinned tolerance, then asserts it.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kk_spectra::bundle::charts::{abelian_chart, abelian_frame, su2_euler_chart, su2_euler_frame};
use kk_spectra::bundle::{
    connection_from_flux, plaquette_curvature, ricci_fd_oracle, ricci_h, BaseLattice, CurvatureField, DiscreteConnection,
    FieldLocation,
};
use kk_spectra::group_rep::{casimir, commutant_dim, real_irreps, CompactGroupModel, GroupElement, RepresentationModel};
use kk_spectra::holomorphic::{default_cluster_tol, h0_dimension, landau_operator, EllipticCurveBundle};
use kk_spectra::mm_space::{
    bump_dimension_bound, check_submetry, equivariance_defect, induced_quotient_map, isometry_defect,
    FiniteMMSpace, IsometricAction,
};
use kk_spectra::scenario::{self, corpus, ScenarioConfig};
use kk_spectra::spectral::{
    averaged_transfer, base_laplacian, chi_discrete, connection_laplacian, eigen_continuity, eigs, isotypic_restriction,
    total_laplacian, voltage_cover, TransferMap,
};

fn report(id: u32, name: &str, pass: bool, detail: String) -> bool {
    println!("{} [{id:02}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn spectrum(op: &kk_spectra::spectral::SymmetricOperator) -> Vec<f64> {
    eigs(op, op.dim()).unwrap().values
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// spectrum(Δ_P) against ⊎ (dim ρ / dim End ρ)·(spectrum Δ^ρ + χ_ρ), assembled here.
fn decomposition_gap(conn: &DiscreteConnection, w: f64) -> f64 {
    let cover = voltage_cover(conn).unwrap();
    let total = spectrum(&total_laplacian(&cover, w).unwrap());
    let mut union = Vec::new();
    for rep in real_irreps(conn.group()).unwrap() {
        let copies = rep.dim() / commutant_dim(conn.group(), &rep).round() as usize;
        let chi = chi_discrete(conn.group(), &rep, w).unwrap();
        let sector = spectrum(&connection_laplacian(conn, &rep).unwrap());
        for _ in 0..copies {
            union.extend(sector.iter().map(|v| v + chi));
        }
    }
    max_diff(&total, &sorted(union))
}

#[test]
fn acceptance_01_cover_decomposition() {
    let start = Instant::now();
    let base = BaseLattice::cycle(3).unwrap();
    let z2 = CompactGroupModel::cyclic(2);
    let links = vec![GroupElement::Index(1), GroupElement::Index(0), GroupElement::Index(0)];
    let conn = DiscreteConnection::new(base, z2, links).unwrap();
    let mut closed: f64 = 0.0;
    for w in [0.5, 1.0, 2.0] {
        let total = spectrum(&total_laplacian(&voltage_cover(&conn).unwrap(), w).unwrap());
        let expect = sorted(vec![0.0, 3.0, 3.0, 1.0 + 2.0 * w, 1.0 + 2.0 * w, 4.0 + 2.0 * w]);
        closed = closed.max(max_diff(&total, &expect)).max(decomposition_gap(&conn, w));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (_, conn) = corpus::random_voltage(&mut rng, 60);
        worst = worst.max(decomposition_gap(&conn, rng.gen_range(0.25..4.0)));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = closed <= 1e-10 && worst <= 1e-10 && secs < 10.0;
    assert!(report(
        1,
        "cover decomposition",
        pass,
        format!("C3/Z2 gap {closed:.2e}, 20 random instances gap {worst:.2e} (tol 1e-10), {secs:.1}s (limit 10s)")
    ));
}

#[test]
fn acceptance_02_casimir_values() {
    let mut e: f64 = 0.0;
    let u1 = CompactGroupModel::u1(16, 1.0).unwrap();
    for n in 0..=6i64 {
        e = e.max((casimir(&RepresentationModel::u1_weight(n), &u1).unwrap().chi - (n * n) as f64).abs());
    }
    let delta = DMatrix::identity(3, 3);
    let su2 = CompactGroupModel::su2(4, delta.clone()).unwrap();
    let adj = casimir(&RepresentationModel::su2_adjoint(), &su2).unwrap().chi;
    e = e.max((adj - 2.0).abs());
    for c in [0.25, 0.5, 2.0, 5.0] {
        let u1c = CompactGroupModel::u1(16, c).unwrap();
        let chi = casimir(&RepresentationModel::u1_weight(4), &u1c).unwrap().chi;
        e = e.max((chi - 16.0 / c).abs());
        let sc = CompactGroupModel::su2(4, &delta * c).unwrap();
        let chi = casimir(&RepresentationModel::su2_adjoint(), &sc).unwrap().chi;
        e = e.max((chi - 2.0 / c).abs());
    }
    assert!(report(2, "Casimir values", e <= 1e-12, format!("max error {e:.2e} (tol 1e-12)")));
}

#[test]
fn acceptance_03_discrete_casimir_limit() {
    let start = Instant::now();
    let sizes = [8usize, 16, 32, 64];
    let mut min_ratio = f64::INFINITY;
    let mut formula: f64 = 0.0;
    let mut bound = true;
    for n in 1..=3usize {
        let errs: Vec<f64> = sizes
            .iter()
            .map(|&m| {
                let w = (m as f64 / (2.0 * PI)).powi(2);
                let chi = chi_discrete(&CompactGroupModel::cyclic(m), &RepresentationModel::cyclic_rotation(m, n), w).unwrap();
                // two generators ±1, each with trace 2cos(2πn/m) on R²
                let x = 2.0 * PI * n as f64 / m as f64;
                formula = formula.max((chi - w * (2.0 - 2.0 * x.cos())).abs() / chi);
                let e = (chi - (n * n) as f64).abs();
                // 0 ≤ x² − (2 − 2cos x) ≤ x⁴/12
                bound &= e <= (2.0 * PI).powi(2) * (n as f64).powi(4) / (12.0 * (m * m) as f64);
                e
            })
            .collect();
        if n <= 2 {
            for p in errs.windows(2) {
                min_ratio = min_ratio.min(p[0] / p[1]);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = min_ratio >= 3.5 && bound && formula <= 1e-12 && secs < 5.0;
    assert!(report(
        3,
        "discrete Casimir limit",
        pass,
        format!("min error ratio under doubling {min_ratio:.3} for n <= 2 (need >= 3.5), C/m^2 bound for n <= 3 {bound}, closed form {formula:.1e}, {secs:.2}s (limit 5s)")
    ));
}

#[test]
fn acceptance_04_landau_levels() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for k in 1..=3i64 {
        let b = EllipticCurveBundle::new([2.0 * PI, 2.0 * PI], k).unwrap();
        let mu = k as f64 / (2.0 * PI);
        assert!((b.mu() - mu).abs() < 1e-15);
        let kk = k as usize;
        let s = eigs(&landau_operator(&b, 64).unwrap(), 4 * kk + 4).unwrap();
        let rel = (s.values[0] - mu).abs() / mu;
        let h0 = h0_dimension(&s, mu, default_cluster_tol(mu)).unwrap();
        let next = &s.values[2 * kk..4 * kk];
        let second = next.iter().sum::<f64>() / next.len() as f64;
        let gap = (second - h0.center - 2.0 * mu).abs() / (2.0 * mu);
        pass &= rel <= 0.02 && h0.dimension == kk && gap <= 0.05;
        lines.push(format!("k={k}: lambda1 {rel:.1e}, mult {}, gap {gap:.1e}", h0.dimension));
    }
    for k in 1..=5i64 {
        let b = EllipticCurveBundle::new([2.0 * PI, 2.0 * PI], k).unwrap();
        let m = 16 * k as usize;
        let s = eigs(&landau_operator(&b, m).unwrap(), 2 * k as usize + 6).unwrap();
        let h0 = h0_dimension(&s, b.mu(), default_cluster_tol(b.mu())).unwrap();
        pass &= h0.dimension == k as usize;
        lines.push(format!("h0(k={k}, {m}^2) = {}", h0.dimension));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    assert!(report(
        4,
        "Landau levels and h0",
        pass,
        format!("{} (tol 2% lowest, 5% gap, exact multiplicity), {secs:.1}s (limit 60s)", lines.join("; "))
    ));
}

#[test]
fn acceptance_05_ricci_formulas() {
    let start = Instant::now();
    let p = [0.4, -0.2, 0.9];
    let (mut fd, mut closed): (f64, f64) = (0.0, 0.0);
    for b in [0.5, 1.0, 2.0] {
        let side = (2.0 * PI / b).sqrt();
        let base = BaseLattice::torus_grid(&[6, 6], &[side, side]).unwrap();
        let u1 = CompactGroupModel::u1(8, 1.0).unwrap();
        let conn = connection_from_flux(&base, &u1, 1).unwrap();
        let lattice = ricci_h(&base, &plaquette_curvature(&conn).unwrap(), &u1, None).unwrap();
        let chart = abelian_chart(move |x| b * x, 1.0);
        let frame = abelian_frame(b * p[0]);
        let ric = &frame * ricci_fd_oracle(&chart, &p, 1e-3).unwrap() * frame.transpose();
        for v in 0..base.n_vertices() {
            fd = fd.max((&ric - &lattice.matrices[v]).amax());
            for e in lattice.hh(v).symmetric_eigenvalues().iter() {
                closed = closed.max((e + b * b / 2.0).abs());
            }
            closed = closed.max((lattice.vv(v)[(0, 0)] - b * b / 2.0).abs());
        }
    }
    let point = BaseLattice::torus_grid(&[], &[]).unwrap();
    let su2 = CompactGroupModel::su2(4, DMatrix::identity(3, 3)).unwrap();
    let lattice = ricci_h(&point, &CurvatureField::zeros(&point, 3, FieldLocation::Vertex), &su2, None).unwrap();
    let q = [0.3, 1.1, -0.4];
    let frame = su2_euler_frame(&q);
    let ric = &frame * ricci_fd_oracle(&su2_euler_chart(), &q, 1e-3).unwrap() * frame.transpose();
    fd = fd.max((&ric - &lattice.matrices[0]).amax());
    let secs = start.elapsed().as_secs_f64();
    let pass = fd <= 1e-5 && closed <= 1e-6 && secs < 10.0;
    assert!(report(
        5,
        "Ricci formulas",
        pass,
        format!("FD difference {fd:.2e} (tol 1e-5, step 1e-3), closed forms {closed:.2e} (tol 1e-6), {secs:.2}s (limit 10s)")
    ));
}

#[test]
fn acceptance_06_gauge_invariance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let u1 = CompactGroupModel::u1(8, 1.0).unwrap();
    let rep = RepresentationModel::u1_weight(1);
    for k in [1i64, 3] {
        let base = BaseLattice::torus_grid(&[10, 10], &[2.0 * PI, 2.0 * PI]).unwrap();
        let conn = connection_from_flux(&base, &u1, k).unwrap();
        let reference = spectrum(&connection_laplacian(&conn, &rep).unwrap());
        for _ in 0..25 {
            let gamma: Vec<_> = (0..base.n_vertices()).map(|_| GroupElement::Angle(rng.gen_range(-PI..PI))).collect();
            let moved = conn.gauge_transform(&gamma).unwrap();
            worst = worst.max(max_diff(&spectrum(&connection_laplacian(&moved, &rep).unwrap()), &reference));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-10 && secs < 30.0;
    assert!(report(6, "gauge invariance", pass, format!("50 transforms, max change {worst:.2e} (tol 1e-10), {secs:.1}s (limit 30s)")));
}

/// Quotient distances and the ball condition by enumeration.
fn brute_force_submetry(space: &FiniteMMSpace, act: &IsometricAction) -> bool {
    let orbits = act.orbits();
    let mut which = vec![0; space.n_points()];
    for (k, o) in orbits.iter().enumerate() {
        for &u in o {
            which[u] = k;
        }
    }
    let qd = |a: usize, b: usize| {
        orbits[a].iter().flat_map(|&u| orbits[b].iter().map(move |&v| (u, v))).map(|(u, v)| space.dist(u, v)).fold(f64::INFINITY, f64::min)
    };
    for u in 0..space.n_points() {
        for r in (0..space.n_points()).map(|v| space.dist(u, v)) {
            let image: Vec<bool> = (0..orbits.len()).map(|k| orbits[k].iter().any(|&v| space.dist(u, v) <= r)).collect();
            let ball: Vec<bool> = (0..orbits.len()).map(|k| qd(which[u], k) <= r).collect();
            if image != ball {
                return false;
            }
        }
    }
    true
}

#[test]
fn acceptance_07_quotient_submetry() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut sub, mut brute, mut bound) = (true, true, true);
    let mut nontrivial = 0;
    for _ in 0..100 {
        let (space, act) = corpus::random_g_space(&mut rng, 12);
        assert!(space.n_points() <= 12);
        sub &= check_submetry(&space, &act).unwrap().holds;
        brute &= brute_force_submetry(&space, &act);
        let phi = corpus::perturbed_map(&mut rng, &space, &act);
        let eps = isometry_defect(&phi).max(equivariance_defect(&phi, &act, &act).unwrap());
        nontrivial += usize::from(eps > 0.0);
        match induced_quotient_map(&phi, &act, &act, None, &[]) {
            Ok(iq) => bound &= iq.defect <= 2.0 * eps,
            Err(_) => bound = false,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = sub && brute && bound && nontrivial > 50 && secs < 20.0;
    assert!(report(
        7,
        "quotient submetry",
        pass,
        format!("100 G-spaces: submetry {sub}, enumeration {brute}, induced bound {bound} (slack 0, {nontrivial} perturbed), {secs:.2}s (limit 20s)")
    ));
}

#[test]
fn acceptance_08_equivariant_averaging() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut equivariance, mut ratio): (f64, f64) = (0.0, 0.0);
    let mut perturbed = 0;
    for _ in 0..100 {
        let (space, act) = corpus::random_g_space(&mut rng, 12);
        let phi = corpus::perturbed_map(&mut rng, &space, &act);
        let eps = equivariance_defect(&phi, &act, &act).unwrap();
        let tests: Vec<Vec<f64>> = (0..space.n_points()).map(|p| (0..space.n_points()).map(|u| space.dist(u, p)).collect()).collect();
        let avg = averaged_transfer(&TransferMap::from_point_map(&phi), &act, &act, None, &tests).unwrap();
        equivariance = equivariance.max(avg.equivariance);
        if eps > 0.0 {
            perturbed += 1;
            ratio = ratio.max(avg.defect / eps);
        } else {
            ratio = ratio.max(if avg.defect == 0.0 { 0.0 } else { f64::INFINITY });
        }
    }
    let pass = equivariance == 0.0 && ratio <= 2.0;
    assert!(report(
        8,
        "equivariant averaging",
        pass,
        format!("equivariance defect {equivariance:e} (exact), max defect/eps {ratio:.3} (bound 2) over {perturbed} non-equivariant maps")
    ));
}

fn circle(m: usize, alpha: f64) -> DiscreteConnection {
    let u1 = CompactGroupModel::u1(8, 1.0).unwrap();
    let mut links = vec![GroupElement::Angle(0.0); m];
    links[m - 1] = GroupElement::Angle(alpha);
    DiscreteConnection::new(BaseLattice::cycle(m).unwrap(), u1, links).unwrap()
}

#[test]
fn acceptance_09_eigenvalue_continuity() {
    let (m, alpha, steps) = (16usize, 0.4, 10usize);
    let rep = RepresentationModel::u1_weight(1);
    let limit = connection_laplacian(&circle(m, alpha), &rep).unwrap();
    // λ_l(α) = 2 − 2cos((2πl + α)/m), doubled in the real form
    let exact = |a: f64| sorted((0..m).flat_map(|l| [2.0 - 2.0 * ((2.0 * PI * l as f64 + a) / m as f64).cos(); 2]).collect());
    let lim_err = max_diff(&spectrum(&limit)[..8], &exact(alpha)[..8]);
    let seq: Vec<_> = (1..=steps).map(|i| connection_laplacian(&circle(m, alpha + 0.5f64.powi(i as i32)), &rep).unwrap()).collect();
    let transfers: Vec<_> = seq.iter().map(|op| TransferMap::identity(op.mass().to_vec())).collect();
    let rows = eigen_continuity(&seq, &limit, &transfers, 8).unwrap();
    let at = |i: usize, j: usize| rows.iter().find(|r| r.i == i && r.j == j).unwrap();
    let (mut min_ratio, mut monotone) = (f64::INFINITY, true);
    for j in 1..=8 {
        for i in 2..steps - 1 {
            min_ratio = min_ratio.min(at(i, j).gap / at(i + 1, j).gap);
            monotone &= at(i + 1, j).angle <= at(i, j).angle;
        }
        monotone &= at(steps - 1, j).angle < at(2, j).angle;
    }
    let pass = lim_err <= 1e-12 && min_ratio >= 1.8 && monotone;
    assert!(report(
        9,
        "eigenvalue continuity",
        pass,
        format!("limit vs closed form {lim_err:.1e}, min gap ratio {min_ratio:.3} (need >= 1.8, j <= 8), angles monotone from i = 3: {monotone}")
    ));
}

#[test]
fn acceptance_10_collapse() {
    let start = Instant::now();
    let z3 = CompactGroupModel::cyclic(3);
    let mut links = vec![GroupElement::Index(0); 5];
    links[2] = GroupElement::Index(1);
    let conn = DiscreteConnection::new(BaseLattice::cycle(5).unwrap(), z3.clone(), links).unwrap();
    let base_exact = sorted((0..5).map(|j| 2.0 - 2.0 * (2.0 * PI * j as f64 / 5.0).cos()).collect());
    let base_err = max_diff(&spectrum(&base_laplacian(conn.base())), &base_exact);
    let cover = voltage_cover(&conn).unwrap();
    let (mut trivial, mut above) = (0.0f64, true);
    let mut lowest = Vec::new();
    for sigma in [1.0, 0.3, 0.1, 0.03, 0.01, 0.001] {
        let total = total_laplacian(&cover, 1.0 / sigma).unwrap();
        for rep in real_irreps(&z3).unwrap() {
            let (iso, _) = isotypic_restriction(&total, &cover.action, &rep).unwrap();
            let s = spectrum(&iso);
            if rep.is_trivial() {
                trivial = trivial.max(max_diff(&s, &base_exact));
            } else {
                let chi = chi_discrete(&z3, &rep, 1.0).unwrap();
                above &= s.iter().all(|&l| l > chi / sigma);
                lowest.push(s[0]);
            }
        }
    }
    let diverges = lowest.windows(2).all(|w| w[1] > w[0]) && *lowest.last().unwrap() > 1e3;
    let secs = start.elapsed().as_secs_f64();
    let pass = base_err <= 1e-12 && trivial <= 1e-10 && above && diverges && secs < 30.0;
    assert!(report(
        10,
        "collapse consistency",
        pass,
        format!("trivial sector vs base {trivial:.2e} (tol 1e-10), nontrivial above chi/sigma {above}, diverging {diverges}, {secs:.2}s (limit 30s)")
    ));
}

#[test]
fn acceptance_11_bump_dimension() {
    let mut pass = true;
    let mut cases = 0;
    for k in 2..=6usize {
        let group = CompactGroupModel::cyclic(k);
        for q in 1..=6usize {
            let n = 4 * k * q;
            let space = FiniteMMSpace::cycle(n).unwrap();
            let perms = (0..k).map(|g| (0..n).map(|u| (u + 4 * q * g) % n).collect()).collect();
            let act = IsometricAction::new(group.clone(), perms).unwrap();
            assert!(act.is_free());
            let reps: Vec<usize> = (0..q).map(|i| 4 * i).collect();
            for rep in real_irreps(&group).unwrap() {
                let mut v = DVector::zeros(rep.dim());
                v[0] = 1.0;
                let b = bump_dimension_bound(&space, &act, &rep, &reps, &vec![v; q], 1.0).unwrap();
                // disjoint supports: the Gram matrix is diagonal with positive entries
                let off = (0..q).flat_map(|a| (0..q).filter(move |&c| c != a).map(move |c| (a, c))).map(|(a, c)| b.gram[(a, c)].abs()).fold(0.0, f64::max);
                pass &= b.rank == q && off < 1e-12 && (0..q).all(|a| b.gram[(a, a)] > 0.0);
                cases += 1;
            }
        }
    }
    assert!(report(11, "bump dimension", pass, format!("Gram rank equals q on {cases} (k, q, rep) cases, k <= 6, q <= 6")));
}

#[test]
fn acceptance_12_determinism() {
    let run_all = || {
        scenario::catalog()
            .iter()
            .map(|s| {
                let out = scenario::run(&ScenarioConfig::builtin(s.name), Some(12)).unwrap();
                let tables: Vec<String> = out.tables.iter().map(scenario::ScenarioOutput::table_csv).collect();
                (out.spectrum_csv(), out.checks_csv(), tables)
            })
            .collect::<Vec<_>>()
    };
    let (a, b) = (run_all(), run_all());
    let bytes: usize = a.iter().map(|(s, c, t)| s.len() + c.len() + t.iter().map(String::len).sum::<usize>()).sum();
    let pass = a == b && bytes > 0;
    assert!(report(12, "determinism", pass, format!("{} scenarios twice with seed 12: {bytes} CSV bytes, identical {}", a.len(), a == b)));
}
