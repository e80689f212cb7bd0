use asep_core::exact::{int_rank, q, solve_lp, solve_lp_with_rows, Int, LinearRow, LpProblem, LpStatus, Rational};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(a, b)| q(a, b))
}

proptest! {
    #[test]
    fn field_laws(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }

    #[test]
    fn lowest_terms_and_display(a in -1000i64..1000, b in 1i64..1000) {
        let r = q(a, b);
        let g = num_gcd(a.unsigned_abs(), b as u64) as i64;
        prop_assert_eq!(r.numer(), &Int::from(a / g));
        prop_assert_eq!(r.denom(), &Int::from(b / g));
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn big_products_stay_exact(a in 1i64..i64::MAX, b in 1i64..i64::MAX) {
        let x = Rational::from(a);
        let y = Rational::from(b);
        let p = &x * &y;
        prop_assert_eq!(&p / &y, x);
        prop_assert_eq!(p.to_string(), (a as i128 * b as i128).to_string());
    }

    #[test]
    fn order_matches_cross_multiplication(a in rat(), b in rat()) {
        let lhs = a.numer() * b.denom();
        let rhs = b.numer() * a.denom();
        prop_assert_eq!(a.cmp(&b), lhs.cmp(&rhs));
    }

    /// min over a few `>=` rows in two variables against the best feasible
    /// pairwise intersection of constraint lines.
    #[test]
    fn two_variable_lp_matches_vertex_enumeration(
        rows in proptest::collection::vec((-5i64..6, -5i64..6, -10i64..11), 1..6),
        cost in (0i64..5, 0i64..5),
    ) {
        let mut p = LpProblem::new(2);
        p.set_objective(0, Rational::from(cost.0));
        p.set_objective(1, Rational::from(cost.1));
        let mut lines: Vec<(Rational, Rational, Rational)> = vec![
            (Rational::ONE, Rational::ZERO, Rational::ZERO),
            (Rational::ZERO, Rational::ONE, Rational::ZERO),
        ];
        for &(a, b, r) in &rows {
            p.add_ge(LinearRow::new(vec![(0, Rational::from(a)), (1, Rational::from(b))], Rational::from(r)));
            lines.push((Rational::from(a), Rational::from(b), Rational::from(r)));
        }
        let feasible = |x: &Rational, y: &Rational| {
            !x.is_negative() && !y.is_negative()
                && lines.iter().all(|(a, b, r)| &(a * x) + &(b * y) >= *r)
        };
        let mut best: Option<Rational> = None;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a1, b1, r1) = &lines[i];
                let (a2, b2, r2) = &lines[j];
                let det = &(a1 * b2) - &(a2 * b1);
                if det.is_zero() {
                    continue;
                }
                let x = &(&(r1 * b2) - &(r2 * b1)) / &det;
                let y = &(&(a1 * r2) - &(a2 * r1)) / &det;
                if feasible(&x, &y) {
                    let v = &(&Rational::from(cost.0) * &x) + &(&Rational::from(cost.1) * &y);
                    best = Some(best.map_or(v.clone(), |b| b.min(v)));
                }
            }
        }
        let sol = solve_lp(&p).unwrap();
        match sol.status {
            LpStatus::Optimal => {
                prop_assert!(best.is_some());
                prop_assert_eq!(Some(sol.objective.clone()), best);
                prop_assert!(p.is_feasible(&sol.x));
            }
            LpStatus::Infeasible => prop_assert!(best.is_none()),
            LpStatus::Unbounded => prop_assert!(false, "costs are nonnegative"),
        }
    }
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

#[test]
fn rank_of_dependent_rows() {
    let rows = vec![
        vec![Int::from(1), Int::from(2), Int::from(3)],
        vec![Int::from(2), Int::from(4), Int::from(6)],
        vec![Int::from(0), Int::from(1), Int::from(1)],
    ];
    assert_eq!(int_rank(rows, 3), 2);
}

#[test]
fn lazy_rows_reach_the_full_optimum() {
    // min x + y/3 with x + y >= 1 and 2x + y >= 3/2 supplied lazily.
    let mut p = LpProblem::new(2);
    p.set_objective(0, Rational::ONE);
    p.set_objective(1, q(1, 3));
    let cuts = [
        LinearRow::new(vec![(0, Rational::ONE), (1, Rational::ONE)], Rational::ONE),
        LinearRow::new(vec![(0, Rational::from(2)), (1, Rational::ONE)], q(3, 2)),
    ];
    let lazy = solve_lp_with_rows(&p, |x| cuts.iter().filter(|r| r.eval(x) < r.rhs).cloned().collect()).unwrap();
    let mut full = p.clone();
    for c in &cuts {
        full.add_ge(c.clone());
    }
    assert_eq!(lazy.solution.objective, solve_lp(&full).unwrap().objective);
    assert_eq!(lazy.solution.objective, q(1, 2));
}

#[test]
fn free_variable_goes_negative() {
    let mut p = LpProblem::new(1);
    p.set_free(0);
    p.set_objective(0, Rational::ONE);
    p.add_ge(LinearRow::new(vec![(0, Rational::ONE)], q(-7, 2)));
    let s = solve_lp(&p).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert_eq!(s.x[0], q(-7, 2));
}

#[test]
fn infeasible_system() {
    let mut p = LpProblem::new(1);
    p.add_le(LinearRow::new(vec![(0, Rational::ONE)], Rational::ONE));
    p.add_ge(LinearRow::new(vec![(0, Rational::ONE)], Rational::from(2)));
    assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
}
