use asep_core::exact::{q, RatMatrix, Rational};
use asep_core::fixtures::{five_node, half_square, six_node_halves, six_node_thirds};
use asep_core::polytope::{
    all_tour_orders, component_histogram, cut_value, is_member, is_vertex, tight_sets, violated_secs, ArcIndex,
    ConstraintSystem, NodeSet, RowId, SolutionPoint,
};
use proptest::prelude::*;

fn tour_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// Vertex test by the rank of every tight row over the full arc space.
fn vertex_by_full_rank(x: &SolutionPoint) -> bool {
    let n = x.n();
    let m = x.m();
    let sys = ConstraintSystem::new(n);
    let mut rows = Vec::new();
    let dense = |arcs: Vec<usize>| {
        let mut r = vec![Rational::ZERO; m];
        for k in arcs {
            r[k] = Rational::ONE;
        }
        r
    };
    for r in sys.row_ids() {
        let tight = match r {
            RowId::Sec(s) => cut_value(x, s).unwrap().is_one(),
            _ => true,
        };
        if tight {
            rows.push(dense(sys.row_arcs(r)));
        }
    }
    for k in (0..m).filter(|&k| x.values()[k].is_zero()) {
        rows.push(dense(vec![k]));
    }
    RatMatrix::from_rows(rows).rank() == m
}

fn brute_cut(x: &[Rational], n: usize, s: NodeSet) -> Rational {
    let idx = ArcIndex::new(n);
    idx.arcs()
        .enumerate()
        .filter(|(_, (i, j))| s.contains(*i) && !s.contains(*j))
        .map(|(k, _)| x[k].clone())
        .sum()
}

proptest! {
    #[test]
    fn arc_index_round_trip(n in 2usize..12) {
        let idx = ArcIndex::new(n);
        prop_assert_eq!(idx.m(), n * (n - 1));
        for k in 0..idx.m() {
            let (i, j) = idx.pair(k);
            prop_assert!(i != j);
            prop_assert_eq!(idx.index(i, j), k);
        }
    }

    #[test]
    fn tours_are_vertices(order in (4usize..8).prop_flat_map(tour_strategy)) {
        let n = order.len();
        let t = SolutionPoint::tour(&order).unwrap();
        prop_assert!(is_member(&t).is_ok());
        prop_assert!(is_vertex(&t).unwrap());
        prop_assert!(vertex_by_full_rank(&t));
        // Tight sets of a tour are its proper contiguous segments, and their complements.
        prop_assert_eq!(tight_sets(&t).len(), n * (n - 3));
    }

    #[test]
    fn midpoint_of_two_tours_is_not_a_vertex(a in tour_strategy(5), b in tour_strategy(5)) {
        let ta = SolutionPoint::tour(&a).unwrap();
        let tb = SolutionPoint::tour(&b).unwrap();
        prop_assume!(ta != tb);
        let mid: Vec<Rational> = ta.values().iter().zip(tb.values()).map(|(u, v)| &(u + v) * &q(1, 2)).collect();
        let x = SolutionPoint::new(5, mid).unwrap();
        prop_assert!(is_member(&x).is_ok());
        prop_assert!(!is_vertex(&x).unwrap());
        prop_assert!(!vertex_by_full_rank(&x));
    }

    #[test]
    fn separation_matches_brute_force(w in proptest::collection::vec(0i64..4, 30)) {
        let n = 6;
        let x: Vec<Rational> = w.iter().map(|&v| q(v, 3)).collect();
        let found = violated_secs(n, &x).unwrap();
        let sys = ConstraintSystem::new(n);
        let expected: Vec<NodeSet> = sys.sec_sets().filter(|&s| brute_cut(&x, n, s) < Rational::ONE).collect();
        let mut got: Vec<NodeSet> = found.iter().map(|(s, _)| *s).collect();
        got.sort();
        prop_assert_eq!(got, expected);
        for (s, v) in found {
            prop_assert_eq!(v, brute_cut(&x, n, s));
        }
    }
}

#[test]
fn fixtures_are_vertices_by_both_tests() {
    let mut pts = vec![half_square(), six_node_thirds(), six_node_halves()];
    pts.extend("abcde".chars().map(five_node));
    for x in pts {
        assert!(is_member(&x).is_ok());
        assert!(is_vertex(&x).unwrap());
        assert!(vertex_by_full_rank(&x));
    }
}

#[test]
fn fixture_histograms() {
    let h = component_histogram(&half_square());
    assert_eq!(h.get(&Rational::ZERO), Some(&4));
    assert_eq!(h.get(&q(1, 2)), Some(&8));
    let h = component_histogram(&five_node('b'));
    assert_eq!(h.get(&Rational::ZERO), Some(&9));
    assert_eq!(h.get(&q(1, 3)), Some(&7));
    assert_eq!(h.get(&q(2, 3)), Some(&4));
}

#[test]
fn two_subtours_violate_a_cut() {
    let one = Rational::ONE;
    let x = SolutionPoint::from_arcs(4, &[(0, 1, one.clone()), (1, 0, one.clone()), (2, 3, one.clone()), (3, 2, one)])
        .unwrap();
    let violated = is_member(&x).unwrap_err();
    assert!(matches!(violated, RowId::Sec(s) if s == NodeSet::from_nodes([0, 1]) || s == NodeSet::from_nodes([2, 3])));
}

#[test]
fn degree_violation_is_reported() {
    let x = SolutionPoint::from_arcs(3, &[(0, 1, Rational::ONE)]).unwrap();
    assert!(is_member(&x).is_err());
}

#[test]
fn all_tours_of_five() {
    let tours = all_tour_orders(5);
    assert_eq!(tours.len(), 24);
    assert!(tours.iter().all(|t| t[0] == 0));
}

#[test]
fn out_of_range_values_rejected() {
    let mut v = vec![Rational::ZERO; 6];
    v[0] = q(3, 2);
    assert!(SolutionPoint::new(3, v).is_err());
    assert!(SolutionPoint::new(3, vec![Rational::ZERO; 5]).is_err());
}
