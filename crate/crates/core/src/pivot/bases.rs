//! Standard form of the polytope and neighbor enumeration by basis exchange.

use std::collections::{BTreeSet, HashSet};

use crate::exact::{int_rank, Int, Rational};
use crate::polytope::{cut_arcs, is_vertex, ConstraintSystem, NodeSet, RowId, SolutionPoint};

use super::{NeighborSet, PivotError};

/// `A z = b, z >= 0` with arc variables first and one surplus per subtour
/// row: `x(δ(S)) - s_S = 1`.
#[derive(Clone, Debug)]
pub struct StandardForm {
    n: usize,
    sets: Vec<NodeSet>,
    rows: Vec<Vec<(usize, i64)>>,
    rank: usize,
}

impl StandardForm {
    pub fn new(n: usize) -> StandardForm {
        let sys = ConstraintSystem::new(n);
        let m = n * (n - 1);
        let sets: Vec<NodeSet> = sys.sec_sets().collect();
        let mut rows: Vec<Vec<(usize, i64)>> = (0..n)
            .map(RowId::InDegree)
            .chain((0..n).map(RowId::OutDegree))
            .map(|r| sys.row_arcs(r).into_iter().map(|k| (k, 1)).collect())
            .collect();
        for (s_idx, s) in sets.iter().enumerate() {
            let mut r: Vec<(usize, i64)> = cut_arcs(n, *s).into_iter().map(|k| (k, 1)).collect();
            r.push((m + s_idx, -1));
            rows.push(r);
        }
        let dense: Vec<Vec<Int>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![Int::ZERO; m + sets.len()];
                for &(j, a) in r {
                    v[j] = Int::from(a);
                }
                v
            })
            .collect();
        let rank = int_rank(dense, m + sets.len());
        StandardForm { n, sets, rows, rank }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vars(&self) -> usize {
        self.n * (self.n - 1) + self.sets.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Rank of `A`, which is the size of every basis.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn sets(&self) -> &[NodeSet] {
        &self.sets
    }

    /// Completes a point with its surplus values.
    pub fn extend(&self, x: &SolutionPoint) -> Vec<Rational> {
        let n = self.n;
        let mut z: Vec<Rational> = x.values().to_vec();
        for s in &self.sets {
            let c: Rational = cut_arcs(n, *s).into_iter().map(|k| &x.values()[k]).sum();
            z.push(c - Rational::ONE);
        }
        z
    }

    /// Gauss-Jordan reduction of `[A | b]` on the basis columns; returns the
    /// tableau rows paired with their basic variable.
    fn tableau(&self, basis: &Basis) -> Option<Vec<(usize, Vec<Rational>)>> {
        let w = self.num_vars();
        let mut t: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![Rational::ZERO; w + 1];
                for &(j, a) in r {
                    v[j] = Rational::from(a);
                }
                v[w] = Rational::ONE;
                v
            })
            .collect();
        let mut out_rows = Vec::with_capacity(basis.0.len());
        let mut r = 0;
        for &c in &basis.0 {
            let p = (r..t.len()).find(|&i| !t[i][c].is_zero())?;
            t.swap(r, p);
            let inv = t[r][c].recip();
            for v in t[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            let nz: Vec<usize> = (0..=w).filter(|&j| !t[r][j].is_zero()).collect();
            for i in 0..t.len() {
                if i != r && !t[i][c].is_zero() {
                    let f = t[i][c].clone();
                    for &j in &nz {
                        let d = &f * &t[r][j];
                        t[i][j] -= &d;
                    }
                }
            }
            out_rows.push(c);
            r += 1;
        }
        t.truncate(r);
        Some(out_rows.into_iter().zip(t).collect())
    }
}

/// Sorted basic variable indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basis(pub Vec<usize>);

impl Basis {
    /// A basis representing `z`: its positive variables, completed greedily.
    pub fn initial(form: &StandardForm, z: &[Rational]) -> Option<Basis> {
        let w = form.num_vars();
        let mut cols: Vec<usize> = (0..w).filter(|&j| !z[j].is_zero()).collect();
        cols.extend((0..w).filter(|&j| z[j].is_zero()));
        let mut chosen: Vec<usize> = Vec::new();
        for c in cols {
            let mut trial = chosen.clone();
            trial.push(c);
            if form.column_rank(&trial) == trial.len() {
                chosen = trial;
                if chosen.len() == form.rank() {
                    break;
                }
            }
        }
        if chosen.len() != form.rank() {
            return None;
        }
        chosen.sort_unstable();
        // Every positive variable must be basic.
        if (0..w).any(|j| !z[j].is_zero() && chosen.binary_search(&j).is_err()) {
            return None;
        }
        Some(Basis(chosen))
    }
}

impl StandardForm {
    fn column_rank(&self, cols: &[usize]) -> usize {
        let rows: Vec<Vec<Int>> = self
            .rows
            .iter()
            .map(|r| {
                cols.iter()
                    .map(|&c| r.iter().find(|(j, _)| *j == c).map_or(Int::ZERO, |&(_, a)| Int::from(a)))
                    .collect()
            })
            .collect();
        int_rank(rows, cols.len())
    }
}

/// Result of [`neighbors_by_bases`].
#[derive(Clone, Debug)]
pub struct BasisWalk {
    pub neighbors: NeighborSet,
    pub bases_visited: usize,
}

/// Enumerates every basis of `x` by depth-first degenerate exchanges and
/// tries each nonbasic variable with an exact ratio test. Stops after
/// `max_bases` bases.
pub fn neighbors_by_bases(x: &SolutionPoint, max_bases: usize) -> Result<BasisWalk, PivotError> {
    if !is_vertex(x)? {
        return Err(PivotError::NotVertex);
    }
    let form = StandardForm::new(x.n());
    let m = x.m();
    let z = form.extend(x);
    let start = Basis::initial(&form, &z).ok_or(PivotError::NotVertex)?;
    let w = form.num_vars();

    let mut visited: HashSet<Basis> = HashSet::new();
    let mut stack = vec![start];
    let mut found: BTreeSet<SolutionPoint> = BTreeSet::new();
    let mut complete = true;
    while let Some(b) = stack.pop() {
        if visited.contains(&b) {
            continue;
        }
        if visited.len() >= max_bases {
            complete = false;
            break;
        }
        visited.insert(b.clone());
        let tab = form.tableau(&b).expect("basis columns are independent");
        let in_basis: HashSet<usize> = b.0.iter().copied().collect();
        for j in (0..w).filter(|j| !in_basis.contains(j)) {
            let mut best: Option<(Rational, usize)> = None;
            for (i, (_, row)) in tab.iter().enumerate() {
                if row[j].is_positive() {
                    let ratio = &row[w] / &row[j];
                    if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
                        best = Some((ratio, i));
                    }
                }
            }
            let Some((t, _)) = best else {
                continue;
            };
            if t.is_zero() {
                continue;
            }
            let mut y = vec![Rational::ZERO; m];
            if j < m {
                y[j] = t.clone();
            }
            for (basic, row) in &tab {
                if *basic < m {
                    y[*basic] = &row[w] - &(&t * &row[j]);
                }
            }
            found.insert(SolutionPoint::new(x.n(), y).expect("pivot stays in the polytope"));
        }
        // Degenerate exchanges keep the same point.
        for (basic, row) in &tab {
            if !row[w].is_zero() {
                continue;
            }
            for j in (0..w).filter(|j| !in_basis.contains(j)) {
                if !row[j].is_zero() {
                    let mut next: Vec<usize> = b.0.iter().copied().filter(|v| v != basic).collect();
                    next.push(j);
                    next.sort_unstable();
                    let nb = Basis(next);
                    if !visited.contains(&nb) {
                        stack.push(nb);
                    }
                }
            }
        }
    }
    Ok(BasisWalk {
        neighbors: NeighborSet {
            points: found.into_iter().collect(),
            complete,
            work: visited.len() as u64,
        },
        bases_visited: visited.len(),
    })
}
