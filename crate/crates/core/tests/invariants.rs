//! Randomized invariants over seeded instance generators.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kk_spectra::bundle::{BaseLattice, DiscreteConnection};
use kk_spectra::group_rep::{real_irreps, CompactGroupModel, GroupElement};
use kk_spectra::mm_space::{
    check_submetry, equivariance_defect, induced_quotient_map, isometry_defect, quotient, FiniteMMSpace,
};
use kk_spectra::scenario::{corpus, Params, ScenarioConfig};
use kk_spectra::spectral::{
    averaged_transfer, chi_discrete, connection_laplacian, cover_decomposition, eigs, total_laplacian, voltage_cover,
    TransferMap,
};

fn values(op: &kk_spectra::spectral::SymmetricOperator) -> Vec<f64> {
    eigs(op, op.dim()).unwrap().values
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cover_spectrum_is_union_of_sectors(seed in any::<u64>(), w in 0.1f64..5.0) {
        let (_, conn) = corpus::random_voltage(&mut ChaCha8Rng::seed_from_u64(seed), 10);
        let d = cover_decomposition(&conn, w).unwrap();
        prop_assert!(d.gap <= 1e-10, "gap {}", d.gap);
        let copies: usize = d.sectors.iter().map(|s| s.copies * s.connection.len()).sum();
        prop_assert_eq!(copies, d.total.len());
        for s in &d.sectors {
            prop_assert!(s.shift_gap <= 1e-10);
        }
    }

    #[test]
    fn finite_gauge_transforms_preserve_spectra(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, conn) = corpus::random_voltage(&mut rng, 10);
        let n = conn.group().len();
        let gamma: Vec<_> = (0..conn.base().n_vertices()).map(|_| GroupElement::Index(rng.gen_range(0..n))).collect();
        let moved = conn.gauge_transform(&gamma).unwrap();
        for rep in real_irreps(conn.group()).unwrap() {
            let a = values(&connection_laplacian(&conn, &rep).unwrap());
            let b = values(&connection_laplacian(&moved, &rep).unwrap());
            let d = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            prop_assert!(d <= 1e-10, "{} moved by {d}", rep.name());
        }
        let c = voltage_cover(&moved).unwrap();
        prop_assert_eq!(values(&total_laplacian(&c, 1.0).unwrap()).len(), n * conn.base().n_vertices());
    }

    #[test]
    fn laplacian_forms_are_nonnegative(seed in any::<u64>(), w in 0.1f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, conn) = corpus::random_voltage(&mut rng, 12);
        let op = total_laplacian(&voltage_cover(&conn).unwrap(), w).unwrap();
        let u: Vec<f64> = (0..op.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        prop_assert!(op.form(&u) >= -1e-12);
        prop_assert!(values(&op)[0].abs() <= 1e-10);
    }

    #[test]
    fn chi_discrete_vanishes_only_on_the_trivial_rep(m in 2usize..9, w in 0.1f64..5.0) {
        let g = CompactGroupModel::cyclic(m);
        for rep in real_irreps(&g).unwrap() {
            let chi = chi_discrete(&g, &rep, w).unwrap();
            if rep.is_trivial() {
                prop_assert!(chi.abs() <= 1e-12);
            } else {
                prop_assert!(chi > 1e-9);
            }
        }
    }

    #[test]
    fn quotients_are_submetries(seed in any::<u64>()) {
        let (space, act) = corpus::random_g_space(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        act.validate_on(&space).unwrap();
        prop_assert!(check_submetry(&space, &act).unwrap().holds);
        let (q, pi) = quotient(&space, &act).unwrap();
        prop_assert_eq!(q.n_points(), act.orbits().len());
        prop_assert!((q.total_mass() - space.total_mass()).abs() <= 1e-12);
        for u in 0..space.n_points() {
            for v in 0..space.n_points() {
                prop_assert!(q.dist(pi.apply(u), pi.apply(v)) <= space.dist(u, v));
            }
        }
    }

    #[test]
    fn induced_quotient_defect_is_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (space, act) = corpus::random_g_space(&mut rng, 12);
        let phi = corpus::perturbed_map(&mut rng, &space, &act);
        let iq = induced_quotient_map(&phi, &act, &act, None, &[]).unwrap();
        prop_assert_eq!(iq.eps0, isometry_defect(&phi));
        prop_assert!(iq.defect <= 2.0 * iq.eps0.max(iq.eps1));
    }

    #[test]
    fn averaging_is_exactly_equivariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (space, act) = corpus::random_g_space(&mut rng, 12);
        let phi = corpus::perturbed_map(&mut rng, &space, &act);
        let tests: Vec<Vec<f64>> = (0..space.n_points()).map(|p| (0..space.n_points()).map(|u| space.dist(u, p)).collect()).collect();
        let avg = averaged_transfer(&TransferMap::from_point_map(&phi), &act, &act, None, &tests).unwrap();
        prop_assert_eq!(avg.equivariance, 0.0);
        prop_assert!(avg.defect <= 2.0 * equivariance_defect(&phi, &act, &act).unwrap());
        let again = averaged_transfer(&avg.map, &act, &act, None, &tests).unwrap();
        prop_assert_eq!(again.defect, 0.0);
    }

    #[test]
    fn cycle_metrics_satisfy_the_axioms(n in 3usize..20) {
        let c = FiniteMMSpace::cycle(n).unwrap();
        for a in 0..n {
            for b in 0..n {
                let d = ((a as i64 - b as i64).rem_euclid(n as i64)).min((b as i64 - a as i64).rem_euclid(n as i64));
                prop_assert_eq!(c.dist(a, b), d as f64);
            }
        }
    }

    #[test]
    fn configs_round_trip_through_json(steps in 5usize..20, alpha in 0.1f64..1.0, seed in any::<u64>()) {
        let cfg = ScenarioConfig {
            seed: Some(seed),
            params: Params { steps: Some(steps), alpha: Some(alpha), ..Params::default() },
            ..ScenarioConfig::builtin("holonomy-continuity")
        };
        let text = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(ScenarioConfig::from_json(&text).unwrap(), cfg);
    }
}

#[test]
fn voltage_with_trivial_holonomy_splits_into_copies() {
    let base = BaseLattice::cycle(4).unwrap();
    let z3 = CompactGroupModel::cyclic(3);
    let conn = DiscreteConnection::trivial(base, z3);
    let cover = voltage_cover(&conn).unwrap();
    assert_eq!(cover.horizontal_components(), 3);
}
