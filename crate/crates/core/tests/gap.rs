use asep_core::exact::{q, Rational};
use asep_core::fixtures::{five_node, half_square, six_node_halves};
use asep_core::gap::{
    lower_bound_report, solve_asep, solve_asep_enumerated, solve_atsp, solve_gap, solve_gap_with, verify_certificate,
    CostVector, GapError, GapOptions, RowFamily,
};
use asep_core::polytope::{all_tour_orders, SolutionPoint};
use asep_core::symmetry::{apply, OrbitRecord, Perm};
use proptest::prelude::*;

fn costs(n: usize) -> impl Strategy<Value = CostVector> {
    proptest::collection::vec((0i64..20, 1i64..4), n * (n - 1))
        .prop_map(move |v| CostVector::new(n, v.into_iter().map(|(a, b)| q(a, b)).collect()).unwrap())
}

fn brute_atsp(c: &CostVector) -> Rational {
    all_tour_orders(c.n()).iter().map(|t| c.tour_cost(t)).min().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn held_karp_matches_enumeration(c in costs(5)) {
        let s = solve_atsp(&c).unwrap();
        prop_assert_eq!(&s.value, &brute_atsp(&c));
        prop_assert_eq!(c.tour_cost(&s.tour), s.value);
        let mut sorted = s.tour.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..5).collect::<Vec<_>>());
    }

    #[test]
    fn relaxation_bounds_and_lazy_matches_enumerated(c in costs(6)) {
        let lazy = solve_asep(&c).unwrap();
        let full = solve_asep_enumerated(&c).unwrap();
        prop_assert_eq!(&lazy.value, &full.value);
        prop_assert_eq!(c.dot(&lazy.point), lazy.value.clone());
        prop_assert!(lazy.value <= solve_atsp(&c).unwrap().value);
    }
}

#[test]
fn unit_costs() {
    for n in 3..=7 {
        let c = CostVector::uniform(n, Rational::ONE);
        assert_eq!(solve_atsp(&c).unwrap().value, Rational::from(n));
        assert_eq!(solve_asep(&c).unwrap().value, Rational::from(n));
    }
}

#[test]
fn tours_have_gap_one() {
    for order in [vec![0, 1, 2, 3], vec![0, 3, 1, 4, 2], vec![0, 2, 4, 1, 5, 3]] {
        let c = solve_gap(&SolutionPoint::tour(&order).unwrap()).unwrap();
        assert_eq!(c.gap_value, Rational::ONE);
        assert_eq!(c.ig_value, Rational::ONE);
    }
}

#[test]
fn four_node_fractional_vertex() {
    let cert = solve_gap(&half_square()).unwrap();
    assert_eq!(cert.ig_value, q(6, 5));
    assert_eq!(solve_atsp(&cert.costs).unwrap().value, Rational::ONE);
    let asep = solve_asep(&cert.costs).unwrap();
    assert_eq!(asep.value, q(5, 6));
    assert_eq!(cert.costs.dot(&half_square()), q(5, 6));
    assert!(verify_certificate(&cert).unwrap().is_sound());
}

#[test]
fn six_node_half_integer_vertex() {
    let cert = solve_gap(&six_node_halves()).unwrap();
    assert_eq!(cert.ig_value, q(4, 3));
    assert!(verify_certificate(&cert).unwrap().is_sound());
}

#[test]
fn row_families_agree() {
    let mut pts = vec![half_square()];
    pts.extend("abcde".chars().map(five_node));
    for x in pts {
        let lazy = solve_gap(&x).unwrap().gap_value;
        for tours in [RowFamily::Lazy, RowFamily::Enumerated] {
            for triangles in [RowFamily::Lazy, RowFamily::Enumerated] {
                let c = solve_gap_with(&x, &GapOptions { tours, triangles }).unwrap();
                assert_eq!(c.gap_value, lazy);
            }
        }
    }
}

#[test]
fn gap_is_orbit_invariant() {
    let perms = [vec![1, 2, 3, 4, 0], vec![4, 3, 2, 1, 0], vec![0, 2, 4, 1, 3]];
    for c in "abcd".chars() {
        let x = five_node(c);
        let g = solve_gap(&x).unwrap().gap_value;
        for p in &perms {
            let y = apply(&Perm::new(p.clone()).unwrap(), &x).unwrap();
            assert_eq!(solve_gap(&y).unwrap().gap_value, g);
        }
    }
}

#[test]
fn certificates_are_tight_under_scaling() {
    for c in "abcd".chars() {
        let cert = solve_gap(&five_node(c)).unwrap();
        let check = verify_certificate(&cert).unwrap();
        assert!(check.is_sound(), "{check:?}");
        assert!(cert.costs.is_pq_metric());
        // Shrinking c* by any t < 1 breaks the tour rows.
        let t = q(9, 10);
        let shrunk = CostVector::new(5, cert.costs.values().iter().map(|v| v * &t).collect()).unwrap();
        assert!(solve_atsp(&shrunk).unwrap().value < Rational::ONE);
    }
}

#[test]
fn non_vertex_is_rejected() {
    let a = SolutionPoint::tour(&[0, 1, 2, 3]).unwrap();
    let b = SolutionPoint::tour(&[0, 2, 1, 3]).unwrap();
    let mid: Vec<Rational> = a.values().iter().zip(b.values()).map(|(u, v)| &(u + v) * &q(1, 2)).collect();
    let x = SolutionPoint::new(4, mid).unwrap();
    assert_eq!(solve_gap(&x).unwrap_err(), GapError::NotVertex);
}

#[test]
fn report_takes_the_maximum_per_n() {
    let mut recs = Vec::new();
    for c in "abcde".chars() {
        let x = five_node(c);
        let mut r = OrbitRecord::from_point(&x);
        r.gap = Some(solve_gap(&x).unwrap().gap_value);
        recs.push(r);
    }
    let mut r6 = OrbitRecord::from_point(&six_node_halves());
    r6.gap = Some(q(3, 4));
    recs.push(r6);
    let rows = lower_bound_report(&recs);
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0].n, rows[0].ig.clone(), rows[0].orbits), (5, q(5, 4), 5));
    assert_eq!((rows[1].n, rows[1].ig.clone()), (6, q(4, 3)));
    assert_eq!(rows[1].decimal(), "1.333333");
}
