//! Exact ATSP and ASEP values and the gap program of a vertex.
//!
//! For a vertex `x` the gap program finds pq-metric costs `c` with minimum
//! tour cost at least 1 for which `x` is an optimal ASEP solution, while
//! minimizing `c · x`. Optimality of `x` is encoded by dual feasibility with
//! complementary slackness: free node potentials `y_out`, `y_in` and
//! nonnegative multipliers `d_S` on the tight sets of `x`.

use std::collections::BTreeMap;
use std::ops::Add;

use num_traits::{Bounded, Zero};
use thiserror::Error;

use crate::exact::{solve_lp, solve_lp_with_rows, Int, LinearRow, LpError, LpProblem, LpStatus, Rational};
use crate::polytope::{
    all_tour_orders, is_member, is_vertex, tight_sets, violated_secs, ArcIndex,
    ConstraintSystem, NodeSet, PolytopeError, RowId, SolutionPoint,
};
use crate::symmetry::OrbitRecord;

/// Largest node count accepted by the Held–Karp solver.
pub const MAX_ATSP_NODES: usize = 20;

/// Largest node count accepted by the ASEP solver.
pub const MAX_ASEP_NODES: usize = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GapError {
    #[error("expected {expected} costs, got {got}")]
    Length { expected: usize, got: usize },
    #[error("cost of arc {0} is negative")]
    NegativeCost(usize),
    #[error("{what} refused for n = {n} (limit {limit})")]
    TooLarge { what: &'static str, n: usize, limit: usize },
    #[error("point is not a vertex")]
    NotVertex,
    #[error("gap program is infeasible; the input is malformed")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Nonnegative arc costs in arc index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CostVector {
    n: usize,
    c: Vec<Rational>,
}

impl CostVector {
    pub fn new(n: usize, c: Vec<Rational>) -> Result<CostVector, GapError> {
        let m = n * n.saturating_sub(1);
        if c.len() != m {
            return Err(GapError::Length {
                expected: m,
                got: c.len(),
            });
        }
        if let Some(k) = c.iter().position(Rational::is_negative) {
            return Err(GapError::NegativeCost(k));
        }
        Ok(CostVector { n, c })
    }

    pub fn uniform(n: usize, v: Rational) -> CostVector {
        CostVector::new(n, vec![v; n * (n - 1)]).expect("uniform costs are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Rational] {
        &self.c
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.c[ArcIndex::new(self.n).index(i, j)]
    }

    /// `c_ij <= c_ik + c_kj` for all distinct `i, j, k`.
    pub fn is_pq_metric(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                i == j || (0..n).all(|k| k == i || k == j || *self.get(i, j) <= self.get(i, k) + self.get(k, j))
            })
        })
    }

    /// `Σ c_k x_k`.
    pub fn dot(&self, x: &SolutionPoint) -> Rational {
        self.c.iter().zip(x.values()).map(|(a, b)| a * b).sum()
    }

    /// Cost of the cyclic tour visiting `order`.
    pub fn tour_cost(&self, order: &[usize]) -> Rational {
        let n = order.len();
        (0..n).map(|k| self.get(order[k], order[(k + 1) % n])).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtspSolution {
    pub value: Rational,
    /// Node order starting at 0.
    pub tour: Vec<usize>,
}

/// Costs scaled to integers by the lcm of their denominators.
fn integer_costs(c: &CostVector) -> Vec<Int> {
    let l = c.values().iter().fold(Int::ONE, |acc, v| acc.lcm(v.denom()));
    c.values().iter().map(|v| (v.numer() * &l).div_exact(v.denom())).collect()
}

/// Exact minimum tour cost by Held–Karp dynamic programming.
pub fn solve_atsp(c: &CostVector) -> Result<AtspSolution, GapError> {
    let n = c.n();
    if n > MAX_ATSP_NODES {
        return Err(GapError::TooLarge {
            what: "exact ATSP",
            n,
            limit: MAX_ATSP_NODES,
        });
    }
    if n == 2 {
        return Ok(AtspSolution {
            value: c.tour_cost(&[0, 1]),
            tour: vec![0, 1],
        });
    }
    let ints = integer_costs(c);
    let max = ints.iter().max().cloned().unwrap_or(Int::ZERO);
    let bound = &max * &Int::from(n as i64 + 1);
    let tour = if bound.as_i64().is_some() {
        let w: Vec<i64> = ints.iter().map(|v| v.as_i64().expect("fits")).collect();
        held_karp(n, &w)
    } else {
        let w: Vec<i128> = ints
            .iter()
            .map(|v| v.to_bigint().try_into().expect("scaled costs fit in i128"))
            .collect();
        held_karp(n, &w)
    };
    Ok(AtspSolution {
        value: c.tour_cost(&tour),
        tour,
    })
}

fn held_karp<T>(n: usize, w: &[T]) -> Vec<usize>
where
    T: Copy + Ord + Add<Output = T> + Bounded + Zero,
{
    let idx = ArcIndex::new(n);
    let cost = |i: usize, j: usize| w[idx.index(i, j)];
    let k = n - 1;
    let states = 1usize << k;
    let inf = T::max_value();
    let mut dp = vec![inf; states * k];
    let mut parent = vec![u8::MAX; states * k];
    for j in 0..k {
        dp[(1 << j) * k + j] = cost(0, j + 1);
    }
    for mask in 1..states {
        for j in 0..k {
            if mask >> j & 1 == 0 {
                continue;
            }
            let cur = dp[mask * k + j];
            if cur == inf {
                continue;
            }
            let rest = !mask & (states - 1);
            let mut r = rest;
            while r != 0 {
                let t = r.trailing_zeros() as usize;
                r &= r - 1;
                let next = mask | 1 << t;
                let cand = cur + cost(j + 1, t + 1);
                if cand < dp[next * k + t] {
                    dp[next * k + t] = cand;
                    parent[next * k + t] = j as u8;
                }
            }
        }
    }
    let full = states - 1;
    let mut best = inf;
    let mut last = 0;
    for j in 0..k {
        let v = dp[full * k + j];
        if v == inf {
            continue;
        }
        let total = v + cost(j + 1, 0);
        if total < best {
            best = total;
            last = j;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut j = last;
    loop {
        order.push(j + 1);
        let p = parent[mask * k + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    order
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsepSolution {
    pub value: Rational,
    pub point: SolutionPoint,
    /// Subtour rows that were added before the optimum was certified.
    pub rows_used: usize,
}

fn asep_problem(c: &CostVector) -> LpProblem {
    let n = c.n();
    let sys = ConstraintSystem::new(n);
    let mut p = LpProblem::new(n * (n - 1));
    for (k, v) in c.values().iter().enumerate() {
        p.set_objective(k, v.clone());
    }
    for r in (0..n).map(RowId::InDegree).chain((0..n).map(RowId::OutDegree)) {
        p.add_eq(sys.linear_row(r));
    }
    p
}

fn asep_result(n: usize, sol: crate::exact::LpSolution, rows_used: usize) -> Result<AsepSolution, GapError> {
    match sol.status {
        LpStatus::Optimal => Ok(AsepSolution {
            value: sol.objective,
            point: SolutionPoint::new(n, sol.x)?,
            rows_used,
        }),
        LpStatus::Infeasible => Err(GapError::Infeasible),
        LpStatus::Unbounded => Err(GapError::Unbounded),
    }
}

/// Exact ASEP value with subtour rows separated by exhaustive subset scan.
pub fn solve_asep(c: &CostVector) -> Result<AsepSolution, GapError> {
    let n = c.n();
    if n > MAX_ASEP_NODES {
        return Err(GapError::TooLarge {
            what: "exact ASEP",
            n,
            limit: MAX_ASEP_NODES,
        });
    }
    let sys = ConstraintSystem::new(n);
    let p = asep_problem(c);
    let lazy = solve_lp_with_rows(&p, |x| {
        if n < 4 {
            return Vec::new();
        }
        violated_secs(n, x)
            .expect("scan within limits")
            .into_iter()
            .map(|(s, _)| sys.linear_row(RowId::Sec(s)))
            .collect()
    })?;
    asep_result(n, lazy.solution, lazy.generated.len())
}

/// ASEP with every subtour row present from the start.
pub fn solve_asep_enumerated(c: &CostVector) -> Result<AsepSolution, GapError> {
    let n = c.n();
    let sys = ConstraintSystem::new(n);
    let mut p = asep_problem(c);
    for s in sys.sec_sets() {
        p.add_ge(sys.linear_row(RowId::Sec(s)));
    }
    asep_result(n, solve_lp(&p)?, sys.sec_count())
}

/// How the exponential row families of the gap program are supplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowFamily {
    Lazy,
    Enumerated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GapOptions {
    pub tours: RowFamily,
    pub triangles: RowFamily,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            tours: RowFamily::Lazy,
            triangles: RowFamily::Lazy,
        }
    }
}

/// Optimal solution of the gap program with its duals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapCertificate {
    pub vertex: SolutionPoint,
    pub costs: CostVector,
    pub y_out: Vec<Rational>,
    pub y_in: Vec<Rational>,
    /// Multipliers of the tight sets, in ascending set order.
    pub d: Vec<(NodeSet, Rational)>,
    /// `Σ x_ij c*_ij`.
    pub gap_value: Rational,
    /// `1 / gap_value`.
    pub ig_value: Rational,
    pub tour_rows: usize,
    pub triangle_rows: usize,
}

/// Variable layout of the gap program.
struct GapLayout {
    n: usize,
    m: usize,
    sets: Vec<NodeSet>,
}

impl GapLayout {
    fn y_out(&self, i: usize) -> usize {
        self.m + i
    }
    fn y_in(&self, j: usize) -> usize {
        self.m + self.n + j
    }
    fn d(&self, s: usize) -> usize {
        self.m + 2 * self.n + s
    }
    fn num_vars(&self) -> usize {
        self.m + 2 * self.n + self.sets.len()
    }
}

fn tour_row(n: usize, order: &[usize]) -> LinearRow {
    let idx = ArcIndex::new(n);
    LinearRow::new(
        (0..n).map(|k| (idx.index(order[k], order[(k + 1) % n]), Rational::ONE)).collect(),
        Rational::ONE,
    )
}

fn triangle_row(n: usize, i: usize, j: usize, k: usize) -> LinearRow {
    let idx = ArcIndex::new(n);
    LinearRow::new(
        vec![
            (idx.index(i, k), Rational::ONE),
            (idx.index(k, j), Rational::ONE),
            (idx.index(i, j), -Rational::ONE),
        ],
        Rational::ZERO,
    )
}

fn triangles(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| {
        (0..n).flat_map(move |j| (0..n).filter(move |&k| i != j && k != i && k != j).map(move |k| (i, j, k)))
    })
}

pub fn solve_gap(x: &SolutionPoint) -> Result<GapCertificate, GapError> {
    solve_gap_with(x, &GapOptions::default())
}

pub fn solve_gap_with(x: &SolutionPoint, opts: &GapOptions) -> Result<GapCertificate, GapError> {
    let n = x.n();
    let lazy_tours = opts.tours == RowFamily::Lazy;
    if lazy_tours && n > MAX_ATSP_NODES {
        return Err(GapError::TooLarge {
            what: "tour separation",
            n,
            limit: MAX_ATSP_NODES,
        });
    }
    if !is_vertex(x)? {
        return Err(GapError::NotVertex);
    }
    let m = x.m();
    let idx = x.arc_index();
    let layout = GapLayout {
        n,
        m,
        sets: tight_sets(x),
    };
    let mut p = LpProblem::new(layout.num_vars());
    for (k, v) in x.values().iter().enumerate() {
        p.set_objective(k, v.clone());
    }
    for i in 0..n {
        p.set_free(layout.y_out(i));
        p.set_free(layout.y_in(i));
    }
    // Dual feasibility, with equality on the support of x.
    for (k, (i, j)) in idx.arcs().enumerate() {
        let mut coeffs = vec![
            (k, Rational::ONE),
            (layout.y_out(i), -Rational::ONE),
            (layout.y_in(j), -Rational::ONE),
        ];
        for (s_idx, s) in layout.sets.iter().enumerate() {
            if s.contains(i) && !s.contains(j) {
                coeffs.push((layout.d(s_idx), -Rational::ONE));
            }
        }
        let row = LinearRow::new(coeffs, Rational::ZERO);
        if x.values()[k].is_zero() {
            p.add_ge(row);
        } else {
            p.add_eq(row);
        }
    }
    if opts.tours == RowFamily::Enumerated {
        for order in all_tour_orders(n) {
            p.add_ge(tour_row(n, &order));
        }
    }
    if opts.triangles == RowFamily::Enumerated {
        for (i, j, k) in triangles(n) {
            p.add_ge(triangle_row(n, i, j, k));
        }
    }

    let mut tour_rows = if lazy_tours { 0 } else { all_tour_orders(n).len() };
    let mut triangle_rows = if opts.triangles == RowFamily::Lazy { 0 } else { triangles(n).count() };
    let lazy = solve_lp_with_rows(&p, |z| {
        let mut rows = Vec::new();
        if opts.triangles == RowFamily::Lazy {
            for (i, j, k) in triangles(n) {
                if z[idx.index(i, j)] > &z[idx.index(i, k)] + &z[idx.index(k, j)] {
                    rows.push(triangle_row(n, i, j, k));
                }
            }
            triangle_rows += rows.len();
        }
        if lazy_tours {
            let costs = CostVector::new(n, z[..m].to_vec()).expect("costs are nonnegative");
            let best = solve_atsp(&costs).expect("size checked");
            if best.value < Rational::ONE {
                rows.push(tour_row(n, &best.tour));
                tour_rows += 1;
            }
        }
        rows
    })?;
    let sol = lazy.solution;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(GapError::Infeasible),
        LpStatus::Unbounded => return Err(GapError::Unbounded),
    }
    let z = sol.x;
    let costs = CostVector::new(n, z[..m].to_vec())?;
    let gap_value = sol.objective;
    Ok(GapCertificate {
        vertex: x.clone(),
        y_out: (0..n).map(|i| z[layout.y_out(i)].clone()).collect(),
        y_in: (0..n).map(|j| z[layout.y_in(j)].clone()).collect(),
        d: layout
            .sets
            .iter()
            .enumerate()
            .map(|(s_idx, s)| (*s, z[layout.d(s_idx)].clone()))
            .collect(),
        ig_value: gap_value.recip(),
        gap_value,
        costs,
        tour_rows,
        triangle_rows,
    })
}

/// Outcome of re-checking a certificate with independent solvers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateCheck {
    pub atsp_value: Rational,
    pub asep_value: Rational,
    /// `c* · x` equals the ASEP value.
    pub attained_at_vertex: bool,
    pub dual_feasible: bool,
    pub complementary_slackness: bool,
    pub pq_metric: bool,
    pub gap_matches: bool,
}

impl CertificateCheck {
    pub fn is_sound(&self) -> bool {
        self.atsp_value.is_one()
            && self.attained_at_vertex
            && self.dual_feasible
            && self.complementary_slackness
            && self.pq_metric
            && self.gap_matches
    }
}

/// Re-derives ATSP(c*) by Held–Karp and ASEP(c*) with every subtour row
/// enumerated, and checks the dual rows exactly.
pub fn verify_certificate(cert: &GapCertificate) -> Result<CertificateCheck, GapError> {
    let x = &cert.vertex;
    is_member(x).map_err(|r| GapError::Polytope(PolytopeError::NotMember(r)))?;
    let atsp = solve_atsp(&cert.costs)?;
    let asep = solve_asep_enumerated(&cert.costs)?;
    let at_x = cert.costs.dot(x);
    let mut dual_feasible = cert.d.iter().all(|(_, v)| !v.is_negative());
    let mut slack_ok = true;
    for (k, (i, j)) in x.arc_index().arcs().enumerate() {
        let mut reduced = &cert.costs.values()[k] - &cert.y_out[i];
        reduced -= &cert.y_in[j];
        for (s, v) in &cert.d {
            if s.contains(i) && !s.contains(j) {
                reduced -= v;
            }
        }
        if reduced.is_negative() {
            dual_feasible = false;
        }
        if !x.values()[k].is_zero() && !reduced.is_zero() {
            slack_ok = false;
        }
    }
    let tight: Vec<NodeSet> = tight_sets(x);
    if cert.d.iter().any(|(s, v)| !v.is_zero() && tight.binary_search(s).is_err()) {
        slack_ok = false;
    }
    let dual_obj: Rational = cert.y_out.iter().chain(&cert.y_in).sum::<Rational>()
        + cert.d.iter().map(|(_, v)| v.clone()).sum::<Rational>();
    Ok(CertificateCheck {
        atsp_value: atsp.value,
        attained_at_vertex: at_x == asep.value,
        asep_value: asep.value,
        dual_feasible,
        complementary_slackness: slack_ok && dual_obj == at_x,
        pq_metric: cert.costs.is_pq_metric(),
        gap_matches: at_x == cert.gap_value,
    })
}

/// Best integrality gap found for one node count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub n: usize,
    pub ig: Rational,
    pub witness: String,
    pub orbits: usize,
}

impl BoundRow {
    pub fn decimal(&self) -> String {
        self.ig.to_decimal(6)
    }
}

/// Maximum integrality gap per node count over records with a gap value.
pub fn lower_bound_report(records: &[OrbitRecord]) -> Vec<BoundRow> {
    let mut best: BTreeMap<usize, BoundRow> = BTreeMap::new();
    for r in records {
        let Some(ig) = r.integrality_gap() else {
            continue;
        };
        let entry = best.entry(r.n()).or_insert_with(|| BoundRow {
            n: r.n(),
            ig: ig.clone(),
            witness: r.key.clone(),
            orbits: 0,
        });
        entry.orbits += 1;
        if ig > entry.ig || (ig == entry.ig && r.key < entry.witness) {
            entry.ig = ig;
            entry.witness = r.key.clone();
        }
    }
    best.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn uniform_costs() {
        let c = CostVector::uniform(5, Rational::ONE);
        assert_eq!(solve_atsp(&c).unwrap().value, Rational::from(5));
        assert_eq!(solve_asep(&c).unwrap().value, Rational::from(5));
        assert!(c.is_pq_metric());
    }

    #[test]
    fn rejects_bad_costs() {
        assert!(matches!(CostVector::new(3, vec![Rational::ONE; 5]), Err(GapError::Length { .. })));
        let mut v = vec![Rational::ONE; 6];
        v[2] = q(-1, 2);
        assert_eq!(CostVector::new(3, v), Err(GapError::NegativeCost(2)));
    }

    #[test]
    fn size_limits() {
        let c = CostVector::uniform(21, Rational::ONE);
        assert!(matches!(solve_atsp(&c), Err(GapError::TooLarge { .. })));
        let c = CostVector::uniform(15, Rational::ONE);
        assert!(matches!(solve_asep(&c), Err(GapError::TooLarge { .. })));
    }

    #[test]
    fn empty_report() {
        assert!(lower_bound_report(&[]).is_empty());
    }
}
