//! Exact two-phase primal simplex over rationals.
//!
//! Pricing is Dantzig's most-negative reduced cost; after a streak of
//! degenerate pivots the solver switches to Bland's smallest-index rule and
//! stays there until the objective strictly improves, which rules out cycling.
//! Lazily generated rows are appended to the optimal tableau and feasibility
//! is restored by dual simplex under the same rule switch.

use std::collections::HashSet;

use thiserror::Error;

use super::rational::Rational;

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 16;

/// A sparse linear row `Σ coeffs · x  (sense)  rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl LinearRow {
    pub fn new(coeffs: Vec<(usize, Rational)>, rhs: Rational) -> LinearRow {
        LinearRow { coeffs, rhs }.normalized()
    }

    /// Merges repeated variables, drops zeros and sorts by variable.
    pub fn normalized(mut self) -> LinearRow {
        self.coeffs.sort_by_key(|(j, _)| *j);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(self.coeffs.len());
        for (j, v) in self.coeffs.drain(..) {
            match merged.last_mut() {
                Some((k, acc)) if *k == j => *acc += &v,
                _ => merged.push((j, v)),
            }
        }
        merged.retain(|(_, v)| !v.is_zero());
        LinearRow {
            coeffs: merged,
            rhs: self.rhs,
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }
}

/// `min objective · x` subject to equality rows, `≥` rows, and per-variable
/// lower bound 0 unless the variable is marked free.
#[derive(Clone, Debug)]
pub struct LpProblem {
    num_vars: usize,
    objective: Vec<Rational>,
    eq_rows: Vec<LinearRow>,
    ge_rows: Vec<LinearRow>,
    free: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Identifies a basic column of the standardized problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisVar {
    /// Structural variable (its positive part when the variable is free).
    Var(usize),
    /// Negative part of a free structural variable.
    VarNeg(usize),
    /// Surplus of the given `≥` row.
    Surplus(usize),
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<Rational>,
    pub objective: Rational,
    pub basis: Vec<BasisVar>,
    pub pivots: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("row references variable {var} but the problem has {num_vars} variables")]
    Dimension { var: usize, num_vars: usize },
    #[error("row generator returned only rows that are already present")]
    GeneratorStalled,
}

/// Result of [`solve_lp_with_rows`].
#[derive(Clone, Debug)]
pub struct LazySolution {
    pub solution: LpSolution,
    pub rounds: usize,
    pub generated: Vec<LinearRow>,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> LpProblem {
        LpProblem {
            num_vars,
            objective: vec![Rational::ZERO; num_vars],
            eq_rows: Vec::new(),
            ge_rows: Vec::new(),
            free: vec![false; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn set_objective(&mut self, var: usize, coeff: Rational) {
        self.objective[var] = coeff;
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn is_free(&self, var: usize) -> bool {
        self.free[var]
    }

    pub fn add_eq(&mut self, row: LinearRow) {
        self.eq_rows.push(row.normalized());
    }

    pub fn add_ge(&mut self, row: LinearRow) {
        self.ge_rows.push(row.normalized());
    }

    /// Adds `Σ a x ≤ b` as `Σ -a x ≥ -b`.
    pub fn add_le(&mut self, row: LinearRow) {
        let neg = LinearRow {
            coeffs: row.coeffs.into_iter().map(|(j, a)| (j, -a)).collect(),
            rhs: -row.rhs,
        };
        self.ge_rows.push(neg.normalized());
    }

    pub fn eq_rows(&self) -> &[LinearRow] {
        &self.eq_rows
    }

    pub fn ge_rows(&self) -> &[LinearRow] {
        &self.ge_rows
    }

    fn validate(&self) -> Result<(), LpError> {
        self.eq_rows.iter().chain(&self.ge_rows).try_for_each(|r| self.validate_row(r))
    }

    fn validate_row(&self, row: &LinearRow) -> Result<(), LpError> {
        match row.coeffs.iter().find(|(j, _)| *j >= self.num_vars) {
            Some((j, _)) => Err(LpError::Dimension {
                var: *j,
                num_vars: self.num_vars,
            }),
            None => Ok(()),
        }
    }

    /// True if `x` satisfies every row and bound exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && (0..self.num_vars).all(|j| self.free[j] || !x[j].is_negative())
            && self.eq_rows.iter().all(|r| r.eval(x) == r.rhs)
            && self.ge_rows.iter().all(|r| r.eval(x) >= r.rhs)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Col {
    Pos(usize),
    Neg(usize),
    Surplus(usize),
    Artificial,
}

struct Tableau {
    cols: Vec<Col>,
    /// rows × (cols + 1); the last entry of each row is the basic value.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs; the last entry is minus the objective value.
    cost: Vec<Rational>,
    allowed: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols.len()
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width() + 1;
        let p = self.rows[r][q].clone();
        if !p.is_one() {
            let inv = p.recip();
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let nz: Vec<usize> = (0..w).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow: Vec<(usize, Rational)> = nz.iter().map(|&j| (j, self.rows[r][j].clone())).collect();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][q].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for (j, v) in &prow {
                row[*j] -= &(&f * v);
            }
        }
        let f = self.cost[q].clone();
        if !f.is_zero() {
            for (j, v) in &prow {
                self.cost[*j] -= &(&f * v);
            }
        }
        self.basis[r] = q;
        self.pivots += 1;
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let w = self.width();
        let mut red: Vec<Rational> = costs.to_vec();
        red.push(Rational::ZERO);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=w {
                let v = &self.rows[i][j];
                if !v.is_zero() {
                    red[j] -= &(cb * v);
                }
            }
        }
        self.cost = red;
    }

    /// Runs simplex iterations on the current costs. Returns false when unbounded.
    fn optimize(&mut self) -> bool {
        let w = self.width();
        let mut streak = 0usize;
        loop {
            let bland = streak >= DEGENERATE_STREAK;
            let mut enter: Option<usize> = None;
            for j in 0..w {
                if !self.allowed[j] || !self.cost[j].is_negative() {
                    continue;
                }
                if bland {
                    enter = Some(j);
                    break;
                }
                match enter {
                    Some(e) if self.cost[j] >= self.cost[e] => {}
                    _ => enter = Some(j),
                }
            }
            let Some(q) = enter else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[q].is_positive() {
                    continue;
                }
                let ratio = &row[w] / &row[q];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return false;
            };
            if ratio.is_zero() {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, q);
        }
    }
}

/// Solves `min objective · x` exactly.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, LpError> {
    solve_warm(p).map(|(sol, _)| sol)
}

/// Optimal tableau kept for re-optimization after rows are added.
struct Warm {
    t: Tableau,
    pos_col: Vec<usize>,
    neg_col: Vec<usize>,
}

fn infeasible(pivots: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        x: Vec::new(),
        objective: Rational::ZERO,
        basis: Vec::new(),
        pivots,
    }
}

fn solve_warm(p: &LpProblem) -> Result<(LpSolution, Option<Warm>), LpError> {
    p.validate()?;

    let mut cols: Vec<Col> = Vec::new();
    let mut pos_col = vec![0usize; p.num_vars];
    let mut neg_col = vec![usize::MAX; p.num_vars];
    for j in 0..p.num_vars {
        pos_col[j] = cols.len();
        cols.push(Col::Pos(j));
        if p.free[j] {
            neg_col[j] = cols.len();
            cols.push(Col::Neg(j));
        }
    }

    // Duplicate rows are the only presolve step.
    let mut seen_eq = HashSet::new();
    let eq_rows: Vec<&LinearRow> = p.eq_rows.iter().filter(|r| seen_eq.insert((*r).clone())).collect();
    let mut seen_ge = HashSet::new();
    let ge_rows: Vec<(usize, &LinearRow)> = p
        .ge_rows
        .iter()
        .enumerate()
        .filter(|(_, r)| seen_ge.insert((*r).clone()))
        .collect();

    let mut surplus_col = Vec::with_capacity(ge_rows.len());
    for (idx, _) in &ge_rows {
        surplus_col.push(cols.len());
        cols.push(Col::Surplus(*idx));
    }
    let structural_width = cols.len();

    // Build rows with nonnegative right-hand sides.
    struct RawRow {
        entries: Vec<(usize, Rational)>,
        rhs: Rational,
        slack_basic: Option<usize>,
    }
    let mut raw: Vec<RawRow> = Vec::new();
    let expand = |row: &LinearRow| -> Vec<(usize, Rational)> {
        let mut e = Vec::with_capacity(row.coeffs.len() * 2);
        for (j, a) in &row.coeffs {
            e.push((pos_col[*j], a.clone()));
            if p.free[*j] {
                e.push((neg_col[*j], -a));
            }
        }
        e
    };
    for row in &eq_rows {
        let mut entries = expand(row);
        let mut rhs = row.rhs.clone();
        if rhs.is_negative() {
            entries.iter_mut().for_each(|(_, v)| *v = -&*v);
            rhs = -rhs;
        }
        raw.push(RawRow {
            entries,
            rhs,
            slack_basic: None,
        });
    }
    for (k, (_, row)) in ge_rows.iter().enumerate() {
        let mut entries = expand(row);
        entries.push((surplus_col[k], -Rational::ONE));
        let mut rhs = row.rhs.clone();
        let mut slack_basic = None;
        if !rhs.is_positive() {
            // -a·x + s = -h with -h ≥ 0: the surplus can start basic.
            entries.iter_mut().for_each(|(_, v)| *v = -&*v);
            rhs = -rhs;
            slack_basic = Some(surplus_col[k]);
        }
        raw.push(RawRow {
            entries,
            rhs,
            slack_basic,
        });
    }

    let mut basis = Vec::with_capacity(raw.len());
    for r in &raw {
        match r.slack_basic {
            Some(c) => basis.push(c),
            None => {
                basis.push(cols.len());
                cols.push(Col::Artificial);
            }
        }
    }
    let width = cols.len();
    let rows: Vec<Vec<Rational>> = raw
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = vec![Rational::ZERO; width + 1];
            for (c, a) in &r.entries {
                v[*c] += a;
            }
            if cols[basis[i]] == Col::Artificial {
                v[basis[i]] = Rational::ONE;
            }
            v[width] = r.rhs.clone();
            v
        })
        .collect();

    let mut t = Tableau {
        allowed: vec![true; width],
        cols,
        rows,
        basis,
        cost: Vec::new(),
        pivots: 0,
    };

    // Phase 1.
    let has_artificial = t.basis.iter().any(|&b| t.cols[b] == Col::Artificial);
    if has_artificial {
        let phase1: Vec<Rational> = t
            .cols
            .iter()
            .map(|c| if *c == Col::Artificial { Rational::ONE } else { Rational::ZERO })
            .collect();
        t.set_costs(&phase1);
        t.optimize();
        if !t.cost[width].is_zero() {
            return Ok((infeasible(t.pivots), None));
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        let mut i = 0;
        while i < t.rows.len() {
            if t.cols[t.basis[i]] != Col::Artificial {
                i += 1;
                continue;
            }
            match (0..structural_width).find(|&j| !t.rows[i][j].is_zero()) {
                Some(q) => {
                    t.pivot(i, q);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        }
        for j in structural_width..width {
            t.allowed[j] = false;
        }
    }

    // Phase 2.
    let mut costs = vec![Rational::ZERO; width];
    for j in 0..p.num_vars {
        costs[pos_col[j]] = p.objective[j].clone();
        if p.free[j] {
            costs[neg_col[j]] = -&p.objective[j];
        }
    }
    t.set_costs(&costs);
    if !t.optimize() {
        let sol = LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: Rational::ZERO,
            basis: Vec::new(),
            pivots: t.pivots,
        };
        return Ok((sol, None));
    }
    let warm = Warm { t, pos_col, neg_col };
    Ok((warm.solution(p), Some(warm)))
}

impl Warm {
    fn solution(&self, p: &LpProblem) -> LpSolution {
        let t = &self.t;
        let width = t.width();
        let mut x = vec![Rational::ZERO; p.num_vars];
    let mut basis_out = Vec::with_capacity(t.basis.len());
    for (i, &b) in t.basis.iter().enumerate() {
        let val = &t.rows[i][width];
        match t.cols[b] {
            Col::Pos(j) => {
                x[j] += val;
                basis_out.push(BasisVar::Var(j));
            }
            Col::Neg(j) => {
                x[j] -= val;
                basis_out.push(BasisVar::VarNeg(j));
            }
            Col::Surplus(r) => basis_out.push(BasisVar::Surplus(r)),
            Col::Artificial => unreachable!("artificial left in phase-2 basis"),
        }
    }
        basis_out.sort();
        let objective: Rational = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        debug_assert_eq!(objective, -&t.cost[width]);
        LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
            basis: basis_out,
            pivots: t.pivots,
        }
    }

    /// Appends `row ≥ rhs` with its surplus basic, expressed in the current
    /// basis. `index` is the row's position among the `≥` rows.
    fn add_ge(&mut self, row: &LinearRow, index: usize, free: &[bool]) {
        let t = &mut self.t;
        let w = t.width();
        for r in t.rows.iter_mut() {
            r.insert(w, Rational::ZERO);
        }
        t.cost.insert(w, Rational::ZERO);
        t.cols.push(Col::Surplus(index));
        t.allowed.push(true);
        // -a·x + s = -b
        let mut v = vec![Rational::ZERO; w + 2];
        for (j, a) in &row.coeffs {
            v[self.pos_col[*j]] -= a;
            if free[*j] {
                v[self.neg_col[*j]] += a;
            }
        }
        v[w] = Rational::ONE;
        v[w + 1] = -&row.rhs;
        for (i, &b) in t.basis.iter().enumerate() {
            let f = v[b].clone();
            if f.is_zero() {
                continue;
            }
            for (j, e) in t.rows[i].iter().enumerate() {
                if !e.is_zero() {
                    v[j] -= &(&f * e);
                }
            }
        }
        t.rows.push(v);
        t.basis.push(w);
    }
}

impl Tableau {
    /// Dual simplex from a dual-feasible basis. Returns false when the
    /// primal is infeasible.
    fn dual_optimize(&mut self) -> bool {
        let w = self.width();
        let mut streak = 0usize;
        loop {
            let bland = streak >= DEGENERATE_STREAK;
            let mut leave: Option<usize> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[w].is_negative() {
                    continue;
                }
                leave = match leave {
                    None => Some(i),
                    Some(l) if bland && self.basis[i] < self.basis[l] => Some(i),
                    Some(l) if !bland && row[w] < self.rows[l][w] => Some(i),
                    keep => keep,
                };
            }
            let Some(r) = leave else {
                return true;
            };
            let mut enter: Option<(usize, Rational)> = None;
            for j in 0..w {
                let a = &self.rows[r][j];
                if !self.allowed[j] || !a.is_negative() {
                    continue;
                }
                let ratio = &self.cost[j] / &a.abs();
                if enter.as_ref().is_none_or(|(_, best)| ratio < *best) {
                    enter = Some((j, ratio));
                }
            }
            let Some((q, ratio)) = enter else {
                return false;
            };
            if ratio.is_zero() {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, q);
        }
    }
}

/// Solves with a lazily generated family of `≥` rows.
///
/// The generator receives each optimal candidate and returns rows it
/// violates; an empty return certifies the candidate. Non-optimal statuses are
/// returned as soon as they occur.
pub fn solve_lp_with_rows<F>(p: &LpProblem, mut generator: F) -> Result<LazySolution, LpError>
where
    F: FnMut(&[Rational]) -> Vec<LinearRow>,
{
    let mut current = p.clone();
    let mut present: HashSet<LinearRow> = current.ge_rows.iter().cloned().collect();
    let mut generated = Vec::new();
    let mut rounds = 1;
    let (mut sol, mut warm) = solve_warm(&current)?;
    loop {
        if sol.status != LpStatus::Optimal {
            return Ok(LazySolution {
                solution: sol,
                rounds,
                generated,
            });
        }
        let rows = generator(&sol.x);
        if rows.is_empty() {
            return Ok(LazySolution {
                solution: sol,
                rounds,
                generated,
            });
        }
        let state = warm.as_mut().expect("optimal solves keep their tableau");
        let mut added = false;
        for row in rows {
            let row = row.normalized();
            if present.insert(row.clone()) {
                current.validate_row(&row)?;
                state.add_ge(&row, current.ge_rows.len(), &current.free);
                current.ge_rows.push(row.clone());
                generated.push(row);
                added = true;
            }
        }
        if !added {
            return Err(LpError::GeneratorStalled);
        }
        rounds += 1;
        if state.t.dual_optimize() {
            sol = state.solution(&current);
        } else {
            sol = infeasible(state.t.pivots);
            warm = None;
        }
    }
}
