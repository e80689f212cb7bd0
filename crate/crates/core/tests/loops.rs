use asep_core::exact::{q, Rational};
use asep_core::fixtures::{five_node, half_square, six_node_halves, six_node_thirds};
use asep_core::loops::{break_loop, collapse, detect_loops, extend_all, CollapseSpec, LambdaLoop, LoopError};
use asep_core::polytope::{cut_value, is_member, is_vertex, tight_sets, NodeSet, SolutionPoint};
use asep_core::symmetry::canonical;
use proptest::prelude::*;

/// Loops found by scanning every ordered pair straight from the definition.
fn loops_by_definition(x: &SolutionPoint) -> Vec<(usize, usize, Rational)> {
    let n = x.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let (u, v) = (x.get(a, b), x.get(b, a));
            let frac = |r: &Rational| r.is_positive() && *r < Rational::ONE;
            if frac(u) && frac(v) && (u + v).is_one() {
                out.push((a, b, u.clone()));
            }
        }
    }
    out
}

fn seeds() -> Vec<SolutionPoint> {
    let mut v = vec![half_square(), six_node_thirds(), six_node_halves()];
    v.extend("abcd".chars().map(five_node));
    v
}

#[test]
fn detection_matches_definition() {
    for x in seeds() {
        let got: Vec<(usize, usize, Rational)> = detect_loops(&x).into_iter().map(|l| (l.v1, l.v2, l.lambda)).collect();
        assert_eq!(got, loops_by_definition(&x));
    }
}

#[test]
fn thirds_fixture_has_the_one_five_loop() {
    let loops = detect_loops(&six_node_thirds());
    assert!(loops.contains(&LambdaLoop {
        v1: 1,
        v2: 5,
        lambda: q(1, 3)
    }));
}

#[test]
fn half_square_loops_and_break() {
    let x = half_square();
    let loops = detect_loops(&x);
    let pairs: Vec<(usize, usize)> = loops.iter().map(|l| (l.v1, l.v2)).collect();
    assert_eq!(pairs, vec![(0, 1), (2, 3)]);
    assert!(loops.iter().all(|l| l.lambda == q(1, 2)));
    assert_eq!(extend_all(&x).unwrap().len(), 2);

    let y = break_loop(&x, &loops[0]).unwrap();
    assert_eq!(y.n(), 5);
    // Eight arcs, minus the two loop arcs, plus four arcs at the new node.
    let nonzero: Vec<&Rational> = y.values().iter().filter(|v| !v.is_zero()).collect();
    assert_eq!(nonzero.len(), 10);
    assert!(nonzero.iter().all(|v| **v == q(1, 2)));
    assert!(is_vertex(&y).unwrap());
}

#[test]
fn broken_pair_is_tight_and_collapses_back() {
    for x in seeds() {
        for l in detect_loops(&x) {
            let y = break_loop(&x, &l).unwrap();
            let s = NodeSet::from_nodes([l.v1, x.n()]);
            assert!(cut_value(&y, s).unwrap().is_one());
            assert!(is_vertex(&y).unwrap());
            let back = collapse(&y, &CollapseSpec::new(s)).unwrap();
            assert_eq!(canonical(&back.point).key(), canonical(&x).key());
            assert!(back.is_vertex);
        }
    }
}

#[test]
fn extension_adds_two_n_minus_two_zeros() {
    for x in seeds() {
        let n = x.n();
        for y in extend_all(&x).unwrap() {
            // 2n new coordinates, four of them nonzero, and the two loop arcs zeroed.
            assert_eq!(y.zero_count(), x.zero_count() + 2 * n - 2);
            assert_eq!(y.values().iter().filter(|v| !v.is_zero()).count(), x.m() - x.zero_count() + 2);
        }
    }
}

#[test]
fn collapsing_a_tight_set_gives_a_member() {
    for x in seeds() {
        for s in tight_sets(&x) {
            let c = collapse(&x, &CollapseSpec::new(s)).unwrap();
            assert!(is_member(&c.point).is_ok());
            assert_eq!(c.point.n(), x.n() - s.len() + 1);
            assert_eq!(c.is_vertex, is_vertex(&c.point).unwrap());
        }
    }
}

#[test]
fn collapse_of_example_pair() {
    let c = collapse(&half_square(), &CollapseSpec::new(NodeSet::from_nodes([0, 1]))).unwrap();
    assert_eq!(c.point.n(), 3);
    assert!(is_member(&c.point).is_ok());
    assert_eq!(c.mapping, vec![0, 0, 1, 2]);
}

#[test]
fn collapse_errors() {
    let x = half_square();
    let loose = NodeSet::from_nodes([0, 2]);
    assert_eq!(collapse(&x, &CollapseSpec::new(loose)), Err(LoopError::NotTight(loose)));
    let s = NodeSet::from_nodes([0, 1]);
    let spec = CollapseSpec {
        set: s,
        target: Some(3),
    };
    assert_eq!(collapse(&x, &spec), Err(LoopError::TargetOutside(3)));
}

proptest! {
    #[test]
    fn tours_collapse_to_tours(order in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle(), start in 0usize..7, len in 2usize..5) {
        let t = SolutionPoint::tour(&order).unwrap();
        let seg = NodeSet::from_nodes((0..len).map(|k| order[(start + k) % 7]));
        let c = collapse(&t, &CollapseSpec::new(seg)).unwrap();
        prop_assert!(c.is_vertex);
        prop_assert!(c.point.is_integral());
        prop_assert_eq!(c.point.n(), 7 - len + 1);
    }
}
