use std::collections::{BTreeMap, BTreeSet};

use asep_core::exact::{RatMatrix, Rational};
use asep_core::fixtures::{five_node, half_square, six_node_thirds};
use asep_core::loops::extend_all;
use asep_core::pivot::{enumerate, explore, neighbors, neighbors_by_bases, neighbors_seeded, Budget, ExploreConfig, StopReason};
use asep_core::polytope::{cut_value, is_member, is_vertex, ConstraintSystem, RowId, SolutionPoint};
use asep_core::symmetry::{apply, canonical, Perm};
use proptest::prelude::*;

/// Every row tight at `x`, as dense 0/1 vectors.
fn tight_rows(x: &SolutionPoint) -> BTreeSet<Vec<Rational>> {
    let m = x.m();
    let sys = ConstraintSystem::new(x.n());
    let dense = |arcs: Vec<usize>| {
        let mut r = vec![Rational::ZERO; m];
        for k in arcs {
            r[k] = Rational::ONE;
        }
        r
    };
    let mut out = BTreeSet::new();
    for r in sys.row_ids() {
        if !matches!(r, RowId::Sec(s) if !cut_value(x, s).unwrap().is_one()) {
            out.insert(dense(sys.row_arcs(r)));
        }
    }
    for k in (0..x.m()).filter(|&k| x.values()[k].is_zero()) {
        out.insert(dense(vec![k]));
    }
    out
}

/// Two vertices are adjacent when their common tight rows have rank `m - 1`.
fn adjacent(x: &SolutionPoint, y: &SolutionPoint) -> bool {
    let common: Vec<Vec<Rational>> = tight_rows(x).intersection(&tight_rows(y)).cloned().collect();
    RatMatrix::from_rows(common).rank() == x.m() - 1
}

fn closure(start: SolutionPoint) -> BTreeMap<SolutionPoint, Vec<SolutionPoint>> {
    let mut graph = BTreeMap::new();
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        if graph.contains_key(&x) {
            continue;
        }
        let nb = neighbors(&x, &Budget::unlimited()).unwrap();
        assert!(nb.complete);
        stack.extend(nb.points.iter().filter(|y| !graph.contains_key(*y)).cloned());
        graph.insert(x, nb.points);
    }
    graph
}

#[test]
fn four_node_polyhedral_graph() {
    let graph = closure(SolutionPoint::tour(&[0, 1, 2, 3]).unwrap());
    assert_eq!(graph.len(), 12);
    let verts: Vec<&SolutionPoint> = graph.keys().collect();
    for (x, nb) in &graph {
        assert!(nb.iter().all(|y| is_member(y).is_ok() && is_vertex(y).unwrap()));
        let expected: Vec<SolutionPoint> = verts.iter().filter(|y| **y != x && adjacent(x, y)).map(|y| (*y).clone()).collect();
        assert_eq!(nb, &expected);
        if x.is_integral() {
            assert_eq!(nb.len(), 10);
        } else {
            assert!(nb.iter().any(SolutionPoint::is_integral));
        }
    }
}

#[test]
fn five_node_neighbors_match_pairwise_adjacency() {
    let graph = closure(SolutionPoint::tour(&[0, 1, 2, 3, 4]).unwrap());
    assert_eq!(graph.len(), 384);
    let verts: Vec<&SolutionPoint> = graph.keys().collect();
    for c in "abcde".chars() {
        let x = five_node(c);
        let nb = &graph[&x];
        let expected: Vec<SolutionPoint> = verts.iter().filter(|y| ***y != x && adjacent(&x, y)).map(|y| (*y).clone()).collect();
        assert_eq!(nb, &expected);
    }
}

#[test]
fn basis_exchange_oracle_agrees() {
    let mut pts = vec![half_square(), SolutionPoint::tour(&[0, 2, 1, 3]).unwrap()];
    pts.extend("abcd".chars().map(five_node));
    for x in pts {
        let walk = neighbors_by_bases(&x, 1_000_000).unwrap();
        assert!(walk.neighbors.complete);
        assert_eq!(walk.neighbors.points, neighbors(&x, &Budget::unlimited()).unwrap().points);
    }
}

#[test]
fn zero_budget_is_empty() {
    for x in [half_square(), five_node('b'), six_node_thirds()] {
        let nb = neighbors(&x, &Budget::work(0)).unwrap();
        assert!(nb.points.is_empty());
        assert!(!nb.complete);
    }
}

#[test]
fn partial_results_are_true_neighbors() {
    let x = five_node('e');
    let full: BTreeSet<SolutionPoint> = neighbors(&x, &Budget::unlimited()).unwrap().points.into_iter().collect();
    for w in [1, 5, 20, 50] {
        let part = neighbors(&x, &Budget::work(w)).unwrap();
        assert!(part.points.iter().all(|y| full.contains(y)));
    }
}

#[test]
fn sampling_beyond_eight_nodes_yields_vertices() {
    let mut x = six_node_thirds();
    while x.n() < 9 {
        x = extend_all(&x).unwrap().remove(0);
    }
    for seed in 0..3 {
        let nb = neighbors_seeded(&x, &Budget::work(2_000), seed).unwrap();
        assert!(nb.points.iter().all(|y| y.n() == 9 && is_vertex(y).unwrap()));
        assert!(nb.points.iter().all(|y| y != &x));
    }
    let a = neighbors_seeded(&x, &Budget::work(2_000), 7).unwrap();
    let b = neighbors_seeded(&x, &Budget::work(2_000), 7).unwrap();
    assert_eq!(a, b);
}

#[test]
fn enumeration_tables() {
    let four = enumerate(4, |_| {}).unwrap();
    assert_eq!(four.stop, StopReason::Exhausted);
    assert_eq!(four.vertex_count(), 12);
    let mut sizes: Vec<u128> = four.records.iter().map(|r| r.orbit_size).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![6, 6]);

    let five = enumerate(5, |_| {}).unwrap();
    assert_eq!(five.vertex_count(), 384);
    let mut sizes: Vec<u128> = five.records.iter().map(|r| r.orbit_size).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![24, 60, 60, 120, 120]);
    let keys: BTreeSet<&String> = five.records.iter().map(|r| &r.key).collect();
    assert_eq!(keys.len(), five.records.len());
}

#[test]
fn explore_respects_iteration_budget_and_is_deterministic() {
    let mut cfg = ExploreConfig::new(6);
    cfg.max_iters = 3;
    cfg.per_vertex = Budget::work(200);
    cfg.seed = 11;
    cfg.solve_gaps = false;
    let a = explore(&[five_node('b')], &cfg, |_| {}).unwrap();
    let b = explore(&[five_node('b')], &cfg, |_| {}).unwrap();
    assert_eq!(a.stop, StopReason::MaxIterations);
    assert_eq!(a.iterations, 3);
    assert_eq!(a.records, b.records);
    assert!(a.records.iter().all(|r| r.n() == 6));
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Perm::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn adjacency_is_equivariant(p in perm_strategy(5), c in 0usize..5) {
        let x = five_node(['a', 'b', 'c', 'd', 'e'][c]);
        let px = apply(&p, &x).unwrap();
        let mut mapped: Vec<SolutionPoint> = neighbors(&x, &Budget::unlimited()).unwrap().points
            .iter()
            .map(|y| apply(&p, y).unwrap())
            .collect();
        mapped.sort();
        prop_assert_eq!(mapped, neighbors(&px, &Budget::unlimited()).unwrap().points);
        prop_assert_eq!(canonical(&px).key(), canonical(&x).key());
    }
}
