//! The built-in scenario catalog.

use std::f64::consts::PI;
use std::fmt::Display;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{corpus, fmt_f64, Context, Plot, ScenarioInfo, ScenarioOutput, Series};
use crate::bundle::{
    charts,
    connection_from_flux, plaquette_curvature, ricci_fd_oracle, ricci_h, BaseLattice, CurvatureField,
    DiscreteConnection, FieldLocation,
};
use crate::group_rep::{casimir, real_irreps, CompactGroupModel, GroupElement, RepresentationModel};
use crate::holomorphic::{default_cluster_tol, h0_bound_table, h0_dimension, landau_operator, EllipticCurveBundle};
use crate::mm_space::{
    bump_dimension_bound, check_submetry, delta_v, equivariance_defect, induced_quotient_map, quotient, subgroups,
    FiniteMMSpace, IsometricAction, MmError,
};
use crate::spectral::{
    averaged_transfer, base_laplacian, chi_discrete, connection_laplacian, cover_decomposition, eigen_continuity, eigs,
    isotypic_restriction, mosco_probe, total_laplacian, voltage_cover, CoverDecomposition, SymmetricOperator, TransferMap,
};

pub(super) static CATALOG: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "voltage-c6",
        doc: "Z2 double cover of the triangle: total spectrum against shifted sector spectra",
        tags: &["cover", "spectral"],
        params: &["group", "sizes", "voltages", "sigma"],
        checks: &["decomposition", "closed-form"],
        run: voltage_c6,
    },
    ScenarioInfo {
        name: "voltage-random",
        doc: "cover decomposition on random graphs with Z2..Z6 and S3 voltages",
        tags: &["cover", "spectral", "random"],
        params: &["instances", "max_size", "sigma"],
        checks: &["decomposition"],
        run: voltage_random,
    },
    ScenarioInfo {
        name: "landau-k3",
        doc: "Landau levels of the flux-3 line bundle on the square torus",
        tags: &["landau", "holomorphic", "spectral"],
        params: &["flux", "sizes"],
        checks: &["lowest-level", "multiplicity", "first-gap"],
        run: landau_k3,
    },
    ScenarioInfo {
        name: "h0-table",
        doc: "dimension of holomorphic sections by degree, with curvature sup norms",
        tags: &["holomorphic", "landau"],
        params: &["flux", "sizes"],
        checks: &["h0"],
        run: h0_table,
    },
    ScenarioInfo {
        name: "ricci-crosscheck",
        doc: "lattice Ricci blocks against finite-difference Ricci of closed-form charts",
        tags: &["curvature"],
        params: &["field", "sigma", "fd_step"],
        checks: &["fd-agreement", "closed-form"],
        run: ricci_crosscheck,
    },
    ScenarioInfo {
        name: "gauge-invariance",
        doc: "connection Laplacian spectra under random gauge transforms",
        tags: &["gauge", "spectral", "random"],
        params: &["flux", "sizes", "charge", "instances"],
        checks: &["gauge"],
        run: gauge_invariance,
    },
    ScenarioInfo {
        name: "quotient-submetry",
        doc: "submetry of quotient maps, induced quotient maps and equivariant averaging on random G-spaces",
        tags: &["metric", "random"],
        params: &["instances", "max_size"],
        checks: &["submetry", "induced-bound", "averaging-equivariant", "averaging-defect"],
        run: quotient_submetry,
    },
    ScenarioInfo {
        name: "holonomy-continuity",
        doc: "eigenvalues and eigenspaces of circle bundles as the holonomy converges",
        tags: &["convergence", "spectral"],
        params: &["sizes", "alpha", "steps", "j_max", "charge"],
        checks: &["gap-ratio", "angle-monotone"],
        run: holonomy_continuity,
    },
    ScenarioInfo {
        name: "collapse-sequence",
        doc: "isotypic spectra of a cover as the fiber shrinks",
        tags: &["collapse", "convergence", "cover"],
        params: &["group", "sizes", "voltages", "sigma"],
        checks: &["trivial-sector", "diverges"],
        run: collapse_sequence,
    },
    ScenarioInfo {
        name: "delta-v-bump",
        doc: "delta_V and equivariant bump sections on free cyclic actions",
        tags: &["metric", "sections"],
        params: &["sizes", "max_size"],
        checks: &["rank"],
        run: delta_v_bump,
    },
    ScenarioInfo {
        name: "mosco-probe",
        doc: "recovery and liminf probes for circle Dirichlet forms under refinement",
        tags: &["convergence"],
        params: &["sizes"],
        checks: &["recovery-rate", "liminf"],
        run: mosco,
    },
    ScenarioInfo {
        name: "casimir-table",
        doc: "Casimir values, their scaling in sigma and the discrete fiber limit",
        tags: &["group"],
        params: &["sigma", "sizes"],
        checks: &["u1", "su2-adjoint", "scaling", "discrete-rate", "discrete-bound"],
        run: casimir_table,
    },
];

fn err<E: Display>(e: E) -> String {
    e.to_string()
}

fn parse_group(name: &str) -> Result<CompactGroupModel, String> {
    let order = |s: &str| s.parse::<usize>().ok().filter(|n| (1..=64).contains(n));
    if name == "S3" {
        return Ok(CompactGroupModel::symmetric3());
    }
    if let Some(m) = name.strip_prefix('Z').and_then(order) {
        return Ok(CompactGroupModel::cyclic(m));
    }
    if let Some(n) = name.strip_prefix('D').and_then(order) {
        return Ok(CompactGroupModel::dihedral(n));
    }
    Err(format!("unknown group `{name}`"))
}

fn rng(ctx: &Context) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(ctx.seed)
}

fn voltage_connection(ctx: &Context, default_group: &str, default_n: usize) -> Result<DiscreteConnection, String> {
    let p = ctx.params;
    let group = parse_group(p.group.as_deref().unwrap_or(default_group))?;
    let n = match p.sizes.as_deref() {
        None => default_n,
        Some([n]) => *n,
        Some(_) => return Err("sizes takes one cycle length".into()),
    };
    let base = BaseLattice::cycle(n).map_err(err)?;
    let voltages = match &p.voltages {
        Some(v) => v.clone(),
        None => {
            let mut v = vec![0; n];
            v[0] = 1 % group.len();
            v
        }
    };
    if voltages.len() != n {
        return Err(format!("{} voltages for {n} edges", voltages.len()));
    }
    DiscreteConnection::new(base, group, voltages.into_iter().map(GroupElement::Index).collect()).map_err(err)
}

fn positive(values: &[f64], what: &str) -> Result<(), String> {
    if values.is_empty() || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(format!("{what} must be a nonempty list of positive numbers"));
    }
    Ok(())
}

/// ⊎ copies·(spectrum Δ^ρ + χ_ρ), sorted.
fn shifted_union(d: &CoverDecomposition) -> Vec<f64> {
    let mut u: Vec<f64> = d
        .sectors
        .iter()
        .flat_map(|s| (0..s.copies).flat_map(move |_| s.connection.iter().map(move |v| v + s.chi)))
        .collect();
    u.sort_by(f64::total_cmp);
    u
}

fn decomposition_residuals(d: &CoverDecomposition) -> Vec<f64> {
    let u = shifted_union(d);
    d.total.iter().zip(&u).map(|(a, b)| (a - b).abs()).collect()
}

fn voltage_c6(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let conn = voltage_connection(ctx, "Z2", 3)?;
    let group = conn.group().clone();
    let n = conn.base().n_vertices();
    let weights = ctx.params.sigma.clone().unwrap_or_else(|| vec![1.0]);
    positive(&weights, "sigma")?;
    let z2 = group.len() == 2;
    let holonomy = conn.links().iter().filter(|g| **g == GroupElement::Index(1)).count() % 2;
    let (mut worst, mut closed) = (0.0f64, 0.0f64);
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for (i, &w) in weights.iter().enumerate() {
        let d = cover_decomposition(&conn, w).map_err(err)?;
        out.push_spectrum(i, &d.total, &decomposition_residuals(&d));
        worst = worst.max(d.gap);
        for s in &d.sectors {
            rows.push(vec![
                fmt_f64(w),
                s.rep.clone(),
                s.dim.to_string(),
                s.commutant.to_string(),
                s.copies.to_string(),
                fmt_f64(s.chi),
                fmt_f64(s.shift_gap),
            ]);
        }
        if z2 {
            let mut expect: Vec<f64> = (0..n)
                .map(|j| 2.0 - 2.0 * (2.0 * PI * j as f64 / n as f64).cos())
                .chain((0..n).map(|j| 2.0 - 2.0 * ((2.0 * PI * j as f64 + PI * holonomy as f64) / n as f64).cos() + 2.0 * w))
                .collect();
            expect.sort_by(f64::total_cmp);
            closed = d.total.iter().zip(&expect).map(|(a, b)| (a - b).abs()).fold(closed, f64::max);
        }
        series.push(Series {
            label: format!("w = {}", fmt_f64(w)),
            points: d.total.iter().enumerate().map(|(j, v)| ((j + 1) as f64, *v)).collect(),
        });
    }
    out.check_le("decomposition", worst, ctx.tol("decomposition", 1e-10), "max gap between total and shifted sector spectra");
    if z2 {
        out.check_le("closed-form", closed, ctx.tol("closed-form", 1e-10), "cycle and Mobius-cycle eigenvalues");
    }
    out.table("sectors", &["fiber_weight", "rep", "dim", "commutant", "copies", "chi", "shift_gap"], rows);
    out.plots.push(Plot {
        name: "spectrum".into(),
        title: "total cover spectrum".into(),
        x_label: "j".into(),
        y_label: "lambda".into(),
        log_y: false,
        series,
    });
    Ok(())
}

fn voltage_random(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let p = ctx.params;
    let instances = p.instances.unwrap_or(20);
    let max_v = p.max_size.unwrap_or(60);
    if max_v < 3 {
        return Err("max_size must be at least 3".into());
    }
    let w = match p.sigma.as_deref() {
        None => 1.0,
        Some([w]) if *w > 0.0 && w.is_finite() => *w,
        _ => return Err("sigma takes one positive fiber weight".into()),
    };
    let mut rng = rng(ctx);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for i in 0..instances {
        let (name, conn) = corpus::random_voltage(&mut rng, max_v);
        let d = cover_decomposition(&conn, w).map_err(err)?;
        out.push_spectrum(i, &d.total, &decomposition_residuals(&d));
        worst = worst.max(d.gap);
        rows.push(vec![
            i.to_string(),
            name,
            conn.base().n_vertices().to_string(),
            conn.base().edges().len().to_string(),
            d.total.len().to_string(),
            fmt_f64(d.gap),
        ]);
    }
    out.check_le("decomposition", worst, ctx.tol("decomposition", 1e-10), format!("max gap over {instances} instances"));
    out.table("instances", &["i", "group", "vertices", "edges", "total_dim", "gap"], rows);
    Ok(())
}

fn broadcast(sizes: &Option<Vec<usize>>, i: usize, default: usize) -> Result<usize, String> {
    match sizes.as_deref() {
        None => Ok(default),
        Some([m]) => Ok(*m),
        Some(ms) => ms.get(i).copied().ok_or_else(|| "sizes must have one entry or one per flux".into()),
    }
}

fn landau_k3(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let p = ctx.params;
    let ks = p.flux.clone().unwrap_or_else(|| vec![3]);
    let (mut lowest, mut gap_err) = (0.0f64, 0.0f64);
    let mut mult_ok = true;
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        if k <= 0 {
            return Err("Landau levels need positive flux".into());
        }
        let m = broadcast(&p.sizes, i, 64)?;
        let b = EllipticCurveBundle::new([2.0 * PI, 2.0 * PI], k).map_err(err)?;
        let op = landau_operator(&b, m).map_err(err)?;
        let kk = k as usize;
        let spectrum = eigs(&op, (4 * kk + 4).min(op.dim())).map_err(err)?;
        out.push_spectrum(i, &spectrum.values, &spectrum.residuals);
        let mu = b.mu();
        let h0 = h0_dimension(&spectrum, mu, default_cluster_tol(mu)).map_err(err)?;
        let rel = (spectrum.values[0] - mu).abs() / mu;
        lowest = lowest.max(rel);
        mult_ok &= h0.dimension == kk;
        let next = &spectrum.values[h0.multiplicity..(2 * h0.multiplicity).min(spectrum.len())];
        let second = next.iter().sum::<f64>() / next.len() as f64;
        let g = (second - h0.center - 2.0 * mu).abs() / (2.0 * mu);
        gap_err = gap_err.max(g);
        rows.push(vec![
            k.to_string(),
            m.to_string(),
            fmt_f64(mu),
            fmt_f64(spectrum.values[0]),
            h0.dimension.to_string(),
            fmt_f64(h0.center),
            fmt_f64(second),
            fmt_f64((second - h0.center) / mu),
        ]);
        series.push(Series {
            label: format!("k = {k}"),
            points: spectrum.values.iter().enumerate().map(|(j, v)| ((j + 1) as f64, v / mu)).collect(),
        });
    }
    out.check_le("lowest-level", lowest, ctx.tol("lowest-level", 0.02), "|lambda_1 - mu| / mu");
    out.check("multiplicity", mult_ok, "complex multiplicity of the lowest cluster equals the flux");
    out.check_le("first-gap", gap_err, ctx.tol("first-gap", 0.05), "|gap - 2 mu| / (2 mu)");
    out.table("levels", &["k", "grid", "mu", "lambda_1", "multiplicity", "center", "second_center", "gap_over_mu"], rows);
    out.plots.push(Plot {
        name: "levels".into(),
        title: "Landau spectrum in units of mu".into(),
        x_label: "j".into(),
        y_label: "lambda / mu".into(),
        log_y: false,
        series,
    });
    Ok(())
}

fn h0_table(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let p = ctx.params;
    let ks = p.flux.clone().unwrap_or_else(|| vec![1, 2, 3, 4, 5, 0, -1, -2]);
    let mut family = Vec::with_capacity(ks.len());
    for (i, &k) in ks.iter().enumerate() {
        let m = broadcast(&p.sizes, i, 16 * (k.unsigned_abs() as usize).max(1))?;
        family.push((EllipticCurveBundle::new([2.0 * PI, 2.0 * PI], k).map_err(err)?, m));
    }
    let table = h0_bound_table(&family).map_err(err)?;
    let mut ok = true;
    let mut rows = Vec::new();
    for r in &table {
        let expected = match r.degree {
            k if k > 0 => k as usize,
            0 => 1,
            _ => 0,
        };
        ok &= r.dimension == expected;
        rows.push(vec![
            r.degree.to_string(),
            fmt_f64(r.area),
            fmt_f64(r.mu),
            r.grid.to_string(),
            fmt_f64(r.max_f),
            r.dimension.to_string(),
            expected.to_string(),
            fmt_f64(r.center),
        ]);
    }
    out.check("h0", ok, "h0 = k for k > 0, 1 for the trivial bundle, 0 for k < 0");
    out.table("h0", &["degree", "area", "mu", "grid", "max_f", "h0", "expected", "center"], rows);
    Ok(())
}

fn ricci_crosscheck(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let p = ctx.params;
    let fields = p.field.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let sigmas = p.sigma.clone().unwrap_or_else(|| vec![1.0]);
    positive(&fields, "field")?;
    positive(&sigmas, "sigma")?;
    let step = p.fd_step.unwrap_or(1e-3);
    if !(step > 0.0 && step < 0.1) {
        return Err("fd_step must lie in (0, 0.1)".into());
    }
    let (mut fd, mut closed) = (0.0f64, 0.0f64);
    let mut rows = Vec::new();
    let point = [0.4, -0.2, 0.9];
    for &b in &fields {
        for &sigma in &sigmas {
            // constant flux: unit degree on a square torus of area 2π/b
            let side = (2.0 * PI / b).sqrt();
            let base = BaseLattice::torus_grid(&[8, 8], &[side, side]).map_err(err)?;
            let u1 = CompactGroupModel::u1(8, sigma).map_err(err)?;
            let conn = connection_from_flux(&base, &u1, 1).map_err(err)?;
            let f = plaquette_curvature(&conn).map_err(err)?;
            let lattice = ricci_h(&base, &f, &u1, None).map_err(err)?;
            let chart = charts::abelian_chart(move |x| b * x, sigma);
            let frame = charts::abelian_frame(b * point[0]);
            let ric = ricci_fd_oracle(&chart, &point, step).map_err(err)?;
            let framed = &frame * ric * frame.transpose();
            let diff = (&framed - &lattice.matrices[0]).amax();
            fd = fd.max(diff);
            let hh = lattice.hh(0).symmetric_eigenvalues();
            let hh_err = hh.iter().map(|e| (e + sigma * b * b / 2.0).abs()).fold(0.0, f64::max);
            let vv_err = (lattice.vv(0)[(0, 0)] - sigma * sigma * b * b / 2.0).abs();
            closed = closed.max(hh_err).max(vv_err);
            rows.push(vec!["u1".into(), fmt_f64(b), fmt_f64(sigma), fmt_f64(diff), fmt_f64(hh_err), fmt_f64(vv_err)]);
        }
    }
    // trivial connection, SU(2) fiber with σ = δ
    let su2 = CompactGroupModel::su2(4, DMatrix::identity(3, 3)).map_err(err)?;
    let point_base = BaseLattice::torus_grid(&[], &[]).map_err(err)?;
    let zero = CurvatureField::zeros(&point_base, 3, FieldLocation::Vertex);
    let lattice = ricci_h(&point_base, &zero, &su2, None).map_err(err)?;
    let chart = charts::su2_euler_chart();
    let euler = [0.3, 1.1, -0.4];
    let frame = charts::su2_euler_frame(&euler);
    let ric = ricci_fd_oracle(&chart, &euler, step).map_err(err)?;
    let diff = (&frame * ric * frame.transpose() - &lattice.matrices[0]).amax();
    fd = fd.max(diff);
    let vv_err = (lattice.vv(0) - DMatrix::identity(3, 3) * 0.5).amax();
    closed = closed.max(vv_err);
    rows.push(vec!["su2".into(), "0".into(), "1".into(), fmt_f64(diff), "0".into(), fmt_f64(vv_err)]);
    out.check_le("fd-agreement", fd, ctx.tol("fd-agreement", 1e-5), format!("max component difference at step {}", fmt_f64(step)));
    out.check_le("closed-form", closed, ctx.tol("closed-form", 1e-6), "HH = -sigma b^2/2, VV = sigma^2 b^2/2, SU(2) VV = 1/2");
    out.table("ricci", &["fiber", "b", "sigma", "fd_diff", "hh_err", "vv_err"], rows);
    Ok(())
}

fn gauge_invariance(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let p = ctx.params;
    let ks = p.flux.clone().unwrap_or_else(|| vec![2]);
    let transforms = p.instances.unwrap_or(50);
    let rep = RepresentationModel::u1_weight(p.charge.unwrap_or(1));
    let mut rng = rng(ctx);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let m = broadcast(&p.sizes, i, 12)?;
        let base = BaseLattice::torus_grid(&[m, m], &[2.0 * PI, 2.0 * PI]).map_err(err)?;
        let u1 = CompactGroupModel::u1(8, 1.0).map_err(err)?;
        let conn = connection_from_flux(&base, &u1, k).map_err(err)?;
        let op = connection_laplacian(&conn, &rep).map_err(err)?;
        let reference = eigs(&op, op.dim()).map_err(err)?;
        out.push_spectrum(i, &reference.values, &reference.residuals);
        for t in 0..transforms {
            let gamma: Vec<GroupElement> = (0..base.n_vertices()).map(|_| GroupElement::Angle(rng.gen_range(-PI..PI))).collect();
            let moved = conn.gauge_transform(&gamma).map_err(err)?;
            let s = eigs(&connection_laplacian(&moved, &rep).map_err(err)?, op.dim()).map_err(err)?;
            let d = s.values.iter().zip(&reference.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(d);
            rows.push(vec![k.to_string(), m.to_string(), t.to_string(), fmt_f64(d)]);
        }
    }
    out.check_le("gauge", worst, ctx.tol("gauge", 1e-10), format!("max eigenvalue change over {transforms} transforms per flux"));
    out.table("transforms", &["k", "grid", "t", "max_change"], rows);
    Ok(())
}

fn quotient_submetry(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let p = ctx.params;
    let instances = p.instances.unwrap_or(100);
    let max_n = p.max_size.unwrap_or(12);
    if max_n < 2 {
        return Err("max_size must be at least 2".into());
    }
    let mut rng = rng(ctx);
    let (mut sub_ok, mut bound_ok, mut eq_ok, mut avg_ok) = (true, true, true, true);
    let mut rows = Vec::new();
    for i in 0..instances {
        let (space, act) = corpus::random_g_space(&mut rng, max_n);
        let sub = check_submetry(&space, &act).map_err(err)?;
        sub_ok &= sub.holds;
        let phi = corpus::perturbed_map(&mut rng, &space, &act);
        let (qt, _) = quotient(&space, &act).map_err(err)?;
        let q_tests: Vec<Vec<f64>> = (0..qt.n_points()).map(|x| (0..qt.n_points()).map(|y| qt.dist(x, y)).collect()).collect();
        let (defect, eps0, eps1) = match induced_quotient_map(&phi, &act, &act, None, &q_tests) {
            Ok(iq) => {
                bound_ok &= iq.measure.iter().all(|m| m.holds());
                (iq.defect, iq.eps0, iq.eps1)
            }
            Err(MmError::BoundViolated { defect, .. }) => {
                bound_ok = false;
                (defect, f64::NAN, f64::NAN)
            }
            Err(e) => return Err(err(e)),
        };
        let eps_eq = equivariance_defect(&phi, &act, &act).map_err(err)?;
        let tests = distance_tests(&space);
        let avg = averaged_transfer(&TransferMap::from_point_map(&phi), &act, &act, None, &tests).map_err(err)?;
        eq_ok &= avg.equivariance == 0.0;
        avg_ok &= avg.defect <= 2.0 * eps_eq;
        rows.push(vec![
            i.to_string(),
            space.n_points().to_string(),
            act.group().len().to_string(),
            sub.holds.to_string(),
            fmt_f64(eps0),
            fmt_f64(eps1),
            fmt_f64(defect),
            fmt_f64(avg.defect),
            fmt_f64(avg.equivariance),
        ]);
    }
    out.check("submetry", sub_ok, format!("quotient maps are submetries on {instances} G-spaces"));
    out.check("induced-bound", bound_ok, "induced defect <= 2 max(eps0, eps1) and the measure inequality, no slack");
    out.check("averaging-equivariant", eq_ok, "averaged transfer commutes exactly with the action");
    out.check("averaging-defect", avg_ok, "sup over distance tests of |Phi f - Phi_hat f| <= 2 eps_equivariance");
    out.table(
        "corpus",
        &["i", "points", "group_order", "submetry", "eps0", "eps1", "induced_defect", "averaging_defect", "averaging_equivariance"],
        rows,
    );
    Ok(())
}

fn distance_tests(space: &FiniteMMSpace) -> Vec<Vec<f64>> {
    (0..space.n_points()).map(|p| (0..space.n_points()).map(|u| space.dist(u, p)).collect()).collect()
}

/// All holonomy on the closing edge, so eigenvectors move with α.
fn circle_connection(m: usize, alpha: f64) -> Result<DiscreteConnection, String> {
    let base = BaseLattice::cycle(m).map_err(err)?;
    let u1 = CompactGroupModel::u1(8, 1.0).map_err(err)?;
    let mut links = vec![GroupElement::Angle(0.0); m];
    links[m - 1] = GroupElement::Angle(alpha);
    DiscreteConnection::new(base, u1, links).map_err(err)
}

fn holonomy_continuity(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let p = ctx.params;
    let m = broadcast(&p.sizes, 0, 16)?;
    let alpha = p.alpha.unwrap_or(0.4);
    let steps = p.steps.unwrap_or(10);
    let j_max = p.j_max.unwrap_or(8);
    if steps < 5 {
        return Err("steps must be at least 5".into());
    }
    let rep = RepresentationModel::u1_weight(p.charge.unwrap_or(1));
    let limit = connection_laplacian(&circle_connection(m, alpha)?, &rep).map_err(err)?;
    let mut seq = Vec::with_capacity(steps);
    for i in 1..=steps {
        let a = alpha + 0.5f64.powi(i as i32);
        seq.push(connection_laplacian(&circle_connection(m, a)?, &rep).map_err(err)?);
    }
    let transfers: Vec<TransferMap> = seq.iter().map(|op| TransferMap::identity(op.mass().to_vec())).collect();
    let rows = eigen_continuity(&seq, &limit, &transfers, j_max).map_err(err)?;
    let at = |i: usize, j: usize| rows.iter().find(|r| r.i == i && r.j == j);
    let (mut min_ratio, mut monotone) = (f64::INFINITY, true);
    let mut table = Vec::new();
    let mut lam = Vec::new();
    let mut gaps = Vec::new();
    for j in 1..=j_max {
        let mut lp = Vec::new();
        let mut gp = Vec::new();
        for i in 0..steps {
            let Some(r) = at(i, j) else { continue };
            out.spectra.push(super::SpectrumRow { i: i + 1, j, lambda: r.lambda, residual: r.gap });
            table.push(vec![(i + 1).to_string(), j.to_string(), fmt_f64(r.lambda), fmt_f64(r.limit), fmt_f64(r.gap), fmt_f64(r.angle)]);
            lp.push(((i + 1) as f64, r.lambda));
            gp.push(((i + 1) as f64, r.gap));
            if i + 1 >= 3 {
                if let Some(next) = at(i + 1, j) {
                    min_ratio = min_ratio.min(r.gap / next.gap);
                    monotone &= next.angle <= r.angle;
                }
            }
        }
        lam.push(Series { label: format!("j = {j}"), points: lp });
        gaps.push(Series { label: format!("j = {j}"), points: gp });
    }
    let shrinks = (1..=j_max).all(|j| match (at(2, j), at(steps - 1, j)) {
        (Some(a), Some(b)) => b.angle < a.angle,
        _ => true,
    });
    out.check_ge("gap-ratio", min_ratio, ctx.tol("gap-ratio", 1.8), "min ratio of consecutive gaps from i = 3");
    out.check("angle-monotone", monotone && shrinks, "eigenspace angles are nonincreasing from i = 3 and shrink");
    out.table("continuity", &["i", "j", "lambda", "limit", "gap", "angle_sine"], table);
    out.plots.push(Plot {
        name: "eigenvalues".into(),
        title: "lambda_{i,j} along the holonomy schedule".into(),
        x_label: "i".into(),
        y_label: "lambda".into(),
        log_y: false,
        series: lam,
    });
    out.plots.push(Plot {
        name: "gaps".into(),
        title: "|lambda_{i,j} - lambda_j|".into(),
        x_label: "i".into(),
        y_label: "gap".into(),
        log_y: true,
        series: gaps,
    });
    Ok(())
}

fn collapse_sequence(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let conn = voltage_connection(ctx, "Z3", 5)?;
    let schedule = ctx.params.sigma.clone().unwrap_or_else(|| vec![1.0, 0.5, 0.25, 0.1, 0.05, 0.01]);
    positive(&schedule, "sigma")?;
    let group = conn.group().clone();
    let cover = voltage_cover(&conn).map_err(err)?;
    let base_spec = eigs(&base_laplacian(conn.base()), conn.base().n_vertices()).map_err(err)?;
    let irreps = real_irreps(&group).map_err(err)?;
    let (mut trivial_err, mut shortfall) = (0.0f64, f64::NEG_INFINITY);
    let mut increasing = true;
    let mut previous: Vec<f64> = vec![f64::NEG_INFINITY; irreps.len()];
    let mut rows = Vec::new();
    let mut series: Vec<Series> = irreps.iter().map(|r| Series { label: r.name().to_string(), points: Vec::new() }).collect();
    for (i, &sigma) in schedule.iter().enumerate() {
        let total = total_laplacian(&cover, 1.0 / sigma).map_err(err)?;
        let ts = eigs(&total, total.dim()).map_err(err)?;
        out.push_spectrum(i, &ts.values, &ts.residuals);
        for (r, rep) in irreps.iter().enumerate() {
            let (iso, _) = isotypic_restriction(&total, &cover.action, rep).map_err(err)?;
            let s = eigs(&iso, iso.dim()).map_err(err)?;
            let low = s.values[0];
            let floor = chi_discrete(&group, rep, 1.0).map_err(err)? / sigma;
            if rep.is_trivial() {
                let d = s.values.iter().zip(&base_spec.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                trivial_err = trivial_err.max(d);
            } else {
                shortfall = shortfall.max(floor - low);
                increasing &= low > previous[r];
            }
            previous[r] = low;
            series[r].points.push((1.0 / sigma, low));
            rows.push(vec![i.to_string(), fmt_f64(sigma), rep.name().to_string(), fmt_f64(low), fmt_f64(floor)]);
        }
    }
    out.check_le("trivial-sector", trivial_err, ctx.tol("trivial-sector", 1e-10), "trivial isotypic spectrum against the base spectrum");
    out.check(
        "diverges",
        shortfall <= 0.0 && increasing,
        format!("nontrivial sectors stay above chi/sigma (max shortfall {}) and grow", fmt_f64(shortfall)),
    );
    out.table("sectors", &["i", "sigma", "rep", "lowest", "chi_over_sigma"], rows);
    out.plots.push(Plot {
        name: "collapse".into(),
        title: "lowest isotypic eigenvalue against 1/sigma".into(),
        x_label: "1/sigma".into(),
        y_label: "lambda_1".into(),
        log_y: false,
        series,
    });
    Ok(())
}

fn delta_v_bump(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let p = ctx.params;
    let orders = p.sizes.clone().unwrap_or_else(|| vec![2, 3, 4, 5, 6]);
    let q_max = p.max_size.unwrap_or(6);
    if orders.iter().any(|k| *k < 2 || *k > 24) || q_max == 0 {
        return Err("orders must lie in 2..=24 and max_size must be positive".into());
    }
    let mut ok = true;
    let mut rows = Vec::new();
    for &k in &orders {
        let group = CompactGroupModel::cyclic(k);
        let subs = subgroups(&group).map_err(err)?;
        let irreps = real_irreps(&group).map_err(err)?;
        for q in 1..=q_max {
            // Z_k rotates a 4kq-cycle by 4q steps: q orbits with representatives 4δ apart
            let n = 4 * k * q;
            let space = FiniteMMSpace::cycle(n).map_err(err)?;
            let perms = (0..k).map(|g| (0..n).map(|u| (u + 4 * q * g) % n).collect()).collect();
            let act = IsometricAction::new(group.clone(), perms).map_err(err)?;
            let reps: Vec<usize> = (0..q).map(|i| 4 * i).collect();
            for rep in &irreps {
                let mut v = DVector::zeros(rep.dim());
                v[0] = 1.0;
                let vectors = vec![v; q];
                let b = bump_dimension_bound(&space, &act, rep, &reps, &vectors, 1.0).map_err(err)?;
                ok &= b.rank == q;
                let dv = delta_v(&space, &act, rep, &subs).map_err(err)?;
                rows.push(vec![k.to_string(), q.to_string(), rep.name().to_string(), b.rank.to_string(), fmt_f64(dv.values[0])]);
            }
        }
    }
    out.check("rank", ok, "Gram rank of averaged bumps equals the number of orbits");
    out.table("bumps", &["k", "orbits", "rep", "rank", "delta_v"], rows);
    Ok(())
}

fn mosco(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let sizes = ctx.params.sizes.clone().unwrap_or_else(|| vec![16, 32, 64, 128]);
    if sizes.len() < 2 || sizes.iter().any(|m| *m < 8 || m % 4 != 0) || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err("sizes must be at least two increasing multiples of 4, each >= 8".into());
    }
    const MODES: usize = 3;
    // a test function is its coefficient vector (a_1, b_1, …, a_N, b_N)
    let sample = |m: usize| {
        let h = 2.0 * PI / m as f64;
        let mut t = DMatrix::zeros(m, 2 * MODES);
        for j in 0..m {
            for n in 1..=MODES {
                t[(j, 2 * n - 2)] = (n as f64 * j as f64 * h).cos();
                t[(j, 2 * n - 1)] = (n as f64 * j as f64 * h).sin();
            }
        }
        TransferMap::new(t, vec![h; m])
    };
    let limit = |c: &[f64]| (1..=MODES).map(|n| PI * (n * n) as f64 * (c[2 * n - 2].powi(2) + c[2 * n - 1].powi(2))).sum::<f64>();
    let mut forms: Vec<SymmetricOperator> = Vec::new();
    let mut recovery = Vec::new();
    for &m in &sizes {
        let base = BaseLattice::torus_grid(&[m], &[2.0 * PI]).map_err(err)?;
        forms.push(base_laplacian(&base));
        recovery.push(sample(m).map_err(err)?);
    }
    let tests = vec![vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0, 0.5, 0.0]];
    // Φ_i u plus an oscillation of frequency m_i/4 and amplitude 4/m_i
    let weak: Vec<(Vec<Vec<f64>>, Vec<f64>)> = tests
        .iter()
        .map(|u| {
            let seq = sizes
                .iter()
                .zip(&recovery)
                .map(|(&m, t)| {
                    let f = (m / 4) as f64;
                    let h = 2.0 * PI / m as f64;
                    t.apply(u).iter().enumerate().map(|(j, x)| x + (f * j as f64 * h).sin() / f).collect()
                })
                .collect();
            (seq, u.clone())
        })
        .collect();
    let rep = mosco_probe(&forms, &limit, &recovery, &tests, &weak).map_err(err)?;
    let mut min_ratio = f64::INFINITY;
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for (t, defects) in rep.recovery.iter().enumerate() {
        for w in defects.windows(2) {
            min_ratio = min_ratio.min(w[0] / w[1]);
        }
        for (d, m) in defects.iter().zip(&sizes) {
            rows.push(vec![t.to_string(), m.to_string(), fmt_f64(*d)]);
        }
        series.push(Series { label: format!("test {t}"), points: sizes.iter().zip(defects).map(|(m, d)| (*m as f64, *d)).collect() });
    }
    let margin = rep.liminf_margin.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.check_ge("recovery-rate", min_ratio, ctx.tol("recovery-rate", 3.5), "min ratio of consecutive recovery defects");
    out.check_le("liminf", margin, ctx.tol("liminf", 0.0), "E(u) - min tail energy of oscillating sequences");
    out.table("recovery", &["test", "grid", "energy_defect"], rows);
    out.plots.push(Plot {
        name: "recovery".into(),
        title: "|E_m(Phi_m u) - E(u)|".into(),
        x_label: "m".into(),
        y_label: "defect".into(),
        log_y: true,
        series,
    });
    Ok(())
}

fn casimir_table(ctx: &Context, out: &mut ScenarioOutput) -> Result<(), String> {
    let p = ctx.params;
    let sigmas = p.sigma.clone().unwrap_or_else(|| vec![1.0]);
    positive(&sigmas, "sigma")?;
    let sizes = p.sizes.clone().unwrap_or_else(|| vec![8, 16, 32, 64]);
    if sizes.len() < 2 || sizes.iter().any(|m| *m < 3) {
        return Err("sizes must list at least two orders >= 3".into());
    }
    let mut rows = Vec::new();
    let (mut u1_err, mut scale_err) = (0.0f64, 0.0f64);
    for &s in &sigmas {
        let g = CompactGroupModel::u1(16, s).map_err(err)?;
        for n in 0..=6i64 {
            let c = casimir(&RepresentationModel::u1_weight(n), &g).map_err(err)?;
            u1_err = u1_err.max((c.chi - (n * n) as f64 / s).abs());
            rows.push(vec!["U(1)".into(), format!("rho_{n}"), fmt_f64(s), fmt_f64(c.chi), fmt_f64((n * n) as f64 / s)]);
        }
        for c in [0.5, 2.0, 3.0] {
            let gc = CompactGroupModel::u1(16, c * s).map_err(err)?;
            let a = casimir(&RepresentationModel::u1_weight(3), &g).map_err(err)?.chi;
            let b = casimir(&RepresentationModel::u1_weight(3), &gc).map_err(err)?.chi;
            scale_err = scale_err.max((b - a / c).abs() / a.abs().max(1.0));
        }
    }
    let delta = DMatrix::identity(3, 3);
    let su2 = CompactGroupModel::su2(4, delta.clone()).map_err(err)?;
    let adj = casimir(&RepresentationModel::su2_adjoint(), &su2).map_err(err)?.chi;
    let half = casimir(&RepresentationModel::su2_spin_half(), &su2).map_err(err)?.chi;
    rows.push(vec!["SU(2)".into(), "adjoint".into(), "1".into(), fmt_f64(adj), "2".into()]);
    rows.push(vec!["SU(2)".into(), "spin_half".into(), "1".into(), fmt_f64(half), "0.75".into()]);
    for c in [0.5, 2.0, 3.0] {
        let sc = CompactGroupModel::su2(4, &delta * c).map_err(err)?;
        let b = casimir(&RepresentationModel::su2_adjoint(), &sc).map_err(err)?.chi;
        scale_err = scale_err.max((b - adj / c).abs() / adj);
    }
    // Z_m ⊂ U(1) with fiber weight (m/2π)²/σ
    let s = sigmas[0];
    let (mut min_ratio, mut bound_ok) = (f64::INFINITY, true);
    let mut drows = Vec::new();
    let mut series = Vec::new();
    for n in [1usize, 2] {
        let target = (n * n) as f64 / s;
        let errs: Vec<f64> = sizes
            .iter()
            .map(|&m| {
                let w = (m as f64 / (2.0 * PI)).powi(2) / s;
                let chi = chi_discrete(&CompactGroupModel::cyclic(m), &RepresentationModel::cyclic_rotation(m, n), w).map_err(err)?;
                let e = (chi - target).abs();
                let bound = (2.0 * PI).powi(2) * (n as f64).powi(4) / (12.0 * s * (m * m) as f64);
                bound_ok &= e <= bound;
                drows.push(vec![n.to_string(), m.to_string(), fmt_f64(chi), fmt_f64(e), fmt_f64(bound)]);
                Ok(e)
            })
            .collect::<Result<_, String>>()?;
        for w in errs.windows(2) {
            min_ratio = min_ratio.min(w[0] / w[1]);
        }
        series.push(Series { label: format!("n = {n}"), points: sizes.iter().zip(&errs).map(|(m, e)| (*m as f64, *e)).collect() });
    }
    out.check_le("u1", u1_err, ctx.tol("u1", 1e-12), "chi(rho_n) = n^2/sigma for n <= 6");
    out.check_le("su2-adjoint", (adj - 2.0).abs(), ctx.tol("su2-adjoint", 1e-12), "chi(adjoint) = 2 at sigma = delta");
    out.check_le("scaling", scale_err, ctx.tol("scaling", 1e-12), "chi(c sigma) = chi(sigma)/c");
    out.check_ge("discrete-rate", min_ratio, ctx.tol("discrete-rate", 3.5), "min ratio of consecutive errors under doubling");
    out.check("discrete-bound", bound_ok, "|chi_discrete - n^2/sigma| <= (2 pi)^2 n^4 / (12 sigma m^2)");
    out.table("casimir", &["group", "rep", "sigma", "chi", "expected"], rows);
    out.table("discrete", &["n", "m", "chi_discrete", "error", "bound"], drows);
    out.plots.push(Plot {
        name: "discrete".into(),
        title: "chi_discrete error on Z_m".into(),
        x_label: "m".into(),
        y_label: "error".into(),
        log_y: true,
        series,
    });
    Ok(())
}
