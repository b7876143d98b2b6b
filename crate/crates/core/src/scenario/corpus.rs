//! Seeded random instances: weighted graphs with voltages and finite G-spaces.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bundle::{BaseLattice, DiscreteConnection};
use crate::group_rep::{CompactGroupModel, GroupElement};
use crate::mm_space::{subgroups, FiniteMMSpace, IsometricAction, PointMap};

/// Z_2, …, Z_6 and S_3.
pub fn small_groups() -> Vec<(String, CompactGroupModel)> {
    let mut out: Vec<(String, CompactGroupModel)> = (2..=6).map(|m| (format!("Z{m}"), CompactGroupModel::cyclic(m))).collect();
    out.push(("S3".into(), CompactGroupModel::symmetric3()));
    out
}

/// Connected graph: a random spanning tree plus `extra` distinct chords,
/// weights uniform in [0.5, 2).
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Vec<(usize, usize, f64)> {
    let mut edges: Vec<(usize, usize, f64)> = (1..n).map(|v| (rng.gen_range(0..v), v, rng.gen_range(0.5..2.0))).collect();
    let mut tries = 0;
    while edges.len() < n - 1 + extra && tries < 20 * (extra + 1) {
        tries += 1;
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (a, b) = (a.min(b), a.max(b));
        if a == b || edges.iter().any(|e| (e.0.min(e.1), e.0.max(e.1)) == (a, b)) {
            continue;
        }
        edges.push((a, b, rng.gen_range(0.5..2.0)));
    }
    edges
}

/// A connected base with 3..=max_vertices vertices, a group from
/// [`small_groups`] and uniformly random voltages.
pub fn random_voltage<R: Rng>(rng: &mut R, max_vertices: usize) -> (String, DiscreteConnection) {
    let groups = small_groups();
    let (name, group) = groups[rng.gen_range(0..groups.len())].clone();
    let n = rng.gen_range(3..=max_vertices.max(3));
    let extra = rng.gen_range(0..=n / 2);
    let edges = random_graph(rng, n, extra);
    let base = BaseLattice::graph(n, &edges).expect("spanning tree keeps the graph connected");
    let links = (0..base.edges().len()).map(|_| GroupElement::Index(rng.gen_range(0..group.len()))).collect();
    let conn = DiscreteConnection::new(base, group, links).expect("indices in range");
    (name, conn)
}

/// Points are right cosets H\G for a few random subgroups H; the metric is
/// the shortest-path closure of integer weights that are constant on
/// G-orbits of point pairs, so the action is isometric and all distances
/// are exact integers.
pub fn random_g_space<R: Rng>(rng: &mut R, max_points: usize) -> (FiniteMMSpace, IsometricAction) {
    let groups = small_groups();
    loop {
        let (_, group) = groups[rng.gen_range(0..groups.len())].clone();
        let table = group.table().expect("finite").clone();
        let subs = subgroups(&group).expect("finite");
        // points are (block, coset); blocks may repeat a subgroup
        let mut cosets: Vec<(usize, Vec<usize>)> = Vec::new();
        let kinds = rng.gen_range(1..=3);
        for block in 0..kinds {
            let h = subs.choose(rng).expect("at least the trivial subgroup");
            if cosets.len() + group.len() / h.len() > max_points {
                continue;
            }
            let mut seen = vec![false; group.len()];
            for g in 0..group.len() {
                if !seen[g] {
                    let mut c: Vec<usize> = h.iter().map(|&x| table.mul(x, g)).collect();
                    c.sort_unstable();
                    for &x in &c {
                        seen[x] = true;
                    }
                    cosets.push((block, c));
                }
            }
        }
        let n = cosets.len();
        if n < 2 {
            continue;
        }
        let find = |block: usize, set: &[usize]| {
            cosets.iter().position(|(b, c)| *b == block && c.as_slice() == set).expect("closed under the action")
        };
        let perms: Vec<Vec<usize>> = (0..group.len())
            .map(|g| {
                cosets
                    .iter()
                    .map(|(b, c)| {
                        let mut img: Vec<usize> = c.iter().map(|&x| table.mul(x, g)).collect();
                        img.sort_unstable();
                        find(*b, &img)
                    })
                    .collect()
            })
            .collect();
        let action = IsometricAction::new(group.clone(), perms).expect("coset action");
        // weights constant on pair orbits
        let mut w = DMatrix::from_element(n, n, -1.0);
        for a in 0..n {
            for b in a + 1..n {
                if w[(a, b)] >= 0.0 {
                    continue;
                }
                let x = rng.gen_range(1..=6) as f64;
                for g in 0..group.len() {
                    let (p, q) = (action.apply(a, g), action.apply(b, g));
                    w[(p, q)] = x;
                    w[(q, p)] = x;
                }
            }
        }
        let edges: Vec<(usize, usize, f64)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| (a, b, w[(a, b)])).collect();
        let space = FiniteMMSpace::from_graph(n, &edges).expect("complete graph");
        let mut mass = vec![0.0; n];
        for orbit in action.orbits() {
            let m = rng.gen_range(1..=4) as f64;
            for u in orbit {
                mass[u] = m;
            }
        }
        let space = space.with_measure(mass).expect("positive");
        return (space, action);
    }
}

/// An approximation of `(space, action)` by itself: the source metric has
/// some pair-orbit weights raised by one, and with probability ½ one point's
/// image is moved, which breaks equivariance.
pub fn perturbed_map<R: Rng>(rng: &mut R, space: &FiniteMMSpace, action: &IsometricAction) -> PointMap {
    let n = space.n_points();
    let group = action.group();
    let mut w = space.dist_matrix().clone();
    let mut done = DMatrix::from_element(n, n, false);
    for a in 0..n {
        for b in a + 1..n {
            if done[(a, b)] {
                continue;
            }
            let bump = if rng.gen_bool(0.3) { 1.0 } else { 0.0 };
            for g in 0..group.len() {
                let (p, q) = (action.apply(a, g), action.apply(b, g));
                w[(p, q)] = space.dist(a, b) + bump;
                w[(q, p)] = space.dist(a, b) + bump;
                done[(p.min(q), p.max(q))] = true;
            }
        }
    }
    let edges: Vec<(usize, usize, f64)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| (a, b, w[(a, b)])).collect();
    let source = FiniteMMSpace::from_graph(n, &edges).expect("complete graph").with_measure(space.measure().to_vec()).expect("same measure");
    let mut map: Vec<usize> = (0..n).collect();
    if rng.gen_bool(0.5) {
        let u = rng.gen_range(0..n);
        map[u] = rng.gen_range(0..n);
    }
    PointMap::new(source, space.clone(), map).expect("indices in range")
}
