use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torusmis::mis::{self, SolverConfig};
use torusmis::{FlatTorus, Graph, GridSpec, IndependentSet, TorusGraph, TorusPoint, VertexId};

fn torus() -> impl Strategy<Value = FlatTorus> {
    (2.0..6.0f64, 2.0..6.0f64, PI / 9.0..=PI / 2.0)
        .prop_map(|(l1, l2, a)| FlatTorus::new(l1, l2, a).unwrap())
}

fn point() -> impl Strategy<Value = TorusPoint> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(x, y)| TorusPoint::new(x, y))
}

/// Perfectly periodic torus with a grid fine enough for the graph to exist.
fn valid_spec(max_cells: usize) -> impl Strategy<Value = GridSpec> {
    (
        2.0..4.5f64,
        2.0..4.5f64,
        35.0..=90.0f64,
        2usize..=24,
        2usize..=24,
    )
        .prop_filter_map("hypotheses", move |(l1, l2, deg, n, m)| {
            let t = FlatTorus::from_degrees(l1, l2, deg).ok()?;
            if n * m > max_cells || !t.is_perfectly_periodic() {
                return None;
            }
            let spec = GridSpec::new(t, n, m).ok()?;
            (2.0 * spec.circumradius() < 1.0).then_some(spec)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn metric_is_symmetric_and_zero_on_diagonal(t in torus(), p in point(), q in point()) {
        prop_assert_eq!(t.metric(p, p), 0.0);
        prop_assert!((t.metric(p, q) - t.metric(q, p)).abs() <= 1e-12);
    }

    #[test]
    fn triangle_inequality(t in torus(), p in point(), q in point(), r in point()) {
        prop_assert!(t.metric(p, q) + t.metric(q, r) >= t.metric(p, r) - 1e-9);
    }

    #[test]
    fn metric_bounded_by_longer_side(t in torus(), p in point(), q in point()) {
        prop_assert!(t.metric(p, q) <= t.l1().max(t.l2()) + 1e-12);
    }

    #[test]
    fn shift_invariance(t in torus(), p in point(), q in point(), dx in -3.0..3.0f64, dy in -3.0..3.0f64) {
        let d = t.metric(p, q);
        let e = t.metric(p.shifted(dx, dy), q.shifted(dx, dy));
        prop_assert!((d - e).abs() <= 1e-9, "{} vs {}", d, e);
    }

    #[test]
    fn agrees_with_exhaustive_search(t in torus(), p in point(), q in point()) {
        let window = (t.search_bound() + 5) as u32;
        let slow = t.metric_oracle(p, q, window).unwrap();
        prop_assert!((t.metric(p, q) - slow).abs() <= 1e-9);
    }

    #[test]
    fn metric_ignores_basis_order(l1 in 2.0..6.0f64, l2 in 2.0..6.0f64, a in PI / 9.0..=PI / 2.0, p in point(), q in point()) {
        // reflecting across the bisector of v1 and v2 swaps the sides
        let t = FlatTorus::new(l1, l2, a).unwrap();
        let s = FlatTorus::new(l2, l1, a).unwrap();
        let d = t.metric(p, q);
        let e = s.metric(TorusPoint::new(p.y(), p.x()), TorusPoint::new(q.y(), q.x()));
        prop_assert!((d - e).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn offsets_match_all_pairs_rule(spec in valid_spec(400)) {
        let fast = TorusGraph::build(spec).unwrap();
        let slow = TorusGraph::naive_build(spec).unwrap();
        prop_assert_eq!(fast.offsets(), slow.offsets());
        let adj = torusmis::grid_graph::naive_adjacency(spec).unwrap();
        for (v, list) in adj.iter().enumerate() {
            let mut got: Vec<usize> = fast.neighbors(v).collect();
            got.sort_unstable();
            prop_assert_eq!(&got, list);
        }
    }

    #[test]
    fn offsets_closed_under_negation(spec in valid_spec(2500)) {
        let g = TorusGraph::build(spec).unwrap();
        let (n, m) = (spec.n(), spec.m());
        for &(s, t) in g.offsets() {
            prop_assert!(s != 0 || t != 0);
            let neg = ((n - s) % n, (m - t) % m);
            prop_assert!(g.offsets().binary_search(&neg).is_ok());
        }
    }

    #[test]
    fn graph_is_regular(spec in valid_spec(2500)) {
        let g = TorusGraph::build(spec).unwrap();
        let d = g.regular_degree();
        for v in 0..g.vertex_count() {
            prop_assert_eq!(g.degree(v), d);
            prop_assert_eq!(g.neighbors(v).count(), d);
        }
    }

    #[test]
    fn builds_and_exports_are_deterministic(spec in valid_spec(400)) {
        let a = TorusGraph::build(spec).unwrap();
        let b = TorusGraph::build(spec).unwrap();
        prop_assert_eq!(a.offsets(), b.offsets());
        let (mut x, mut y) = (Vec::new(), Vec::new());
        a.export_dimacs(&mut x).unwrap();
        b.export_dimacs(&mut y).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn solvers_return_independent_sets(spec in valid_spec(900), seed in any::<u64>()) {
        let g = TorusGraph::build(spec).unwrap();
        let start = mis::greedy(&g, seed);
        prop_assert!(mis::validate(&g, &start).unwrap());
        let cfg = SolverConfig::with_seed(seed).with_budget(300);
        let improved = mis::local_search(&g, &start, &cfg).unwrap();
        prop_assert!(mis::validate(&g, &improved).unwrap());
        prop_assert!(improved.size() >= start.size());
        prop_assert_eq!(&improved, &mis::local_search(&g, &start, &cfg).unwrap());
        let bound = mis::certified_bound(&g, &improved).unwrap();
        prop_assert!(bound <= mis::DENSITY_UPPER_BOUND);
    }
}

/// Points drawn near two non-adjacent vertices (inside the disc of radius `r`
/// that covers each cell) never sit at unit distance.
#[test]
fn non_edges_are_unit_distance_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let specs = [
        (3.331, 3.331, 60.0, 8, 8),
        (2.8, 5.2, 25.0, 10, 18),
        (3.4, 3.4, 60.0, 9, 7),
        (3.0, 3.2, 90.0, 10, 10),
    ];
    for (l1, l2, deg, n, m) in specs {
        let t = FlatTorus::from_degrees(l1, l2, deg).unwrap();
        let spec = GridSpec::new(t, n, m).unwrap();
        let g = TorusGraph::build(spec).unwrap();
        let r = g.circumradius();
        let mut near = |v: VertexId| -> TorusPoint {
            let p = spec.point(v);
            let c = t.to_cartesian(p.x(), p.y());
            let (rho, phi) = (r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            let a = t.to_affine([c[0] + rho * phi.cos(), c[1] + rho * phi.sin()]);
            TorusPoint::new(a[0], a[1])
        };
        let mut checked = 0;
        for u in 0..g.vertex_count() {
            for v in (u + 1)..g.vertex_count() {
                if g.is_adjacent(u, v) || (u * 31 + v) % 7 != 0 {
                    continue;
                }
                let (vu, vv) = (spec.vertex(u).unwrap(), spec.vertex(v).unwrap());
                for _ in 0..100 {
                    let d = t.metric(near(vu), near(vv));
                    assert!((d - 1.0).abs() >= 1e-6, "unit distance across a non-edge");
                }
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn local_search_never_loses_members() {
    let t = FlatTorus::from_degrees(3.331, 3.331, 60.0).unwrap();
    let g = TorusGraph::build(GridSpec::new(t, 40, 40).unwrap()).unwrap();
    for seed in 0..5 {
        let start = mis::radial_greedy(&g, seed);
        let cfg = SolverConfig::with_seed(seed).with_budget(2_000);
        let out = mis::local_search(&g, &start, &cfg).unwrap();
        assert!(out.size() >= start.size());
    }
    let empty = IndependentSet::empty(g.vertex_count());
    let out = mis::local_search(&g, &empty, &SolverConfig::with_seed(0).with_budget(10)).unwrap();
    assert!(out.size() > 0);
}
