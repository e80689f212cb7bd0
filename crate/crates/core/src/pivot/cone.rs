//! Adjacent vertices from the extreme rays of the tangent cone.
//!
//! At a vertex `x` the feasible directions form the cone of `d` with the
//! degree rows `A d = 0`, `d_k >= 0` on zero arcs and `d(δ(S)) >= 0` on tight
//! sets. Its extreme rays are the edge directions at `x`. They are found by
//! the double description method in integer coordinates of the null space
//! of `A`, and each is followed until the first non-tight row blocks it.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exact::{Int, Rational};
use crate::polytope::{
    is_vertex, scaled_weights, scan_cuts, tight_sets, ArcIndex, ConstraintSystem, RowId, SolutionPoint,
};

use super::{Budget, NeighborSet, PivotError};

/// Above this many nodes the row insertion order is shuffled by the seed.
pub const DETERMINISTIC_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Bits {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    v: Vec<Int>,
    zeros: Bits,
}

fn dot(a: &[Int], b: &[Int]) -> Int {
    let mut s = Int::ZERO;
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += &(x * y);
        }
    }
    s
}

fn primitive(mut v: Vec<Int>) -> Vec<Int> {
    let g = v.iter().fold(Int::ZERO, |acc, e| acc.gcd(e));
    if !g.is_zero() && !g.is_one() {
        for e in v.iter_mut() {
            *e = e.div_exact(&g);
        }
    }
    v
}

/// Integer basis of the null space of the degree rows, as columns `m × k`.
fn degree_null_space(n: usize) -> Vec<Vec<Int>> {
    let sys = ConstraintSystem::new(n);
    let m = n * (n - 1);
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(RowId::InDegree)
        .chain((0..n).map(RowId::OutDegree))
        .map(|r| {
            let mut v = vec![Rational::ZERO; m];
            for k in sys.row_arcs(r) {
                v[k] = Rational::ONE;
            }
            v
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..m {
                    if !rows[r][j].is_zero() {
                        let d = &f * &rows[r][j];
                        rows[i][j] -= &d;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::ZERO; m];
            v[f] = Rational::ONE;
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&rows[row][f];
            }
            let l = v.iter().fold(Int::ONE, |acc, e| acc.lcm(e.denom()));
            v.iter().map(|e| &(e.numer() * &l) / e.denom()).collect()
        })
        .collect()
}

/// Solves `B y = e_i` for every `i` over the rationals; returns primitive
/// integer columns.
fn inverse_columns(b: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let k = b.len();
    let mut aug: Vec<Vec<Rational>> = b
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v: Vec<Rational> = row.iter().map(|e| Rational::from(e.clone())).collect();
            v.extend((0..k).map(|j| if i == j { Rational::ONE } else { Rational::ZERO }));
            v
        })
        .collect();
    for c in 0..k {
        let p = (c..k).find(|&i| !aug[i][c].is_zero()).expect("initial rows are independent");
        aug.swap(c, p);
        let inv = aug[c][c].recip();
        for v in aug[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..k {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..2 * k {
                    if !aug[c][j].is_zero() {
                        let d = &f * &aug[c][j];
                        aug[i][j] -= &d;
                    }
                }
            }
        }
    }
    (0..k)
        .map(|col| {
            let v: Vec<Rational> = (0..k).map(|row| aug[row][k + col].clone()).collect();
            let l = v.iter().fold(Int::ONE, |acc, e| acc.lcm(e.denom()));
            primitive(v.iter().map(|e| &(e.numer() * &l) / e.denom()).collect())
        })
        .collect()
}

/// Tight inequality rows at `x` as arc index lists: zero arcs, then tight sets.
fn tight_rows(x: &SolutionPoint) -> Vec<Vec<usize>> {
    let n = x.n();
    let mut rows: Vec<Vec<usize>> = (0..x.m()).filter(|&k| x.values()[k].is_zero()).map(|k| vec![k]).collect();
    let sys = ConstraintSystem::new(n);
    rows.extend(tight_sets(x).into_iter().map(|s| sys.row_arcs(RowId::Sec(s))));
    rows
}

struct Meter<'a> {
    budget: &'a Budget,
    start: Instant,
    used: u64,
}

impl Meter<'_> {
    /// Charges one unit; false once the budget is spent.
    fn charge(&mut self) -> bool {
        self.used += 1;
        if let Some(w) = self.budget.work {
            if self.used > w {
                return false;
            }
        }
        if let Some(t) = self.budget.wall {
            if self.used.is_multiple_of(256) && self.start.elapsed() >= t {
                return false;
            }
        }
        true
    }
}

/// Adjacent vertices of `x`, up to the budget.
pub fn neighbors(x: &SolutionPoint, budget: &Budget) -> Result<NeighborSet, PivotError> {
    neighbors_seeded(x, budget, 0)
}

/// As [`neighbors`]; above [`DETERMINISTIC_LIMIT`] nodes the seed fixes the
/// order in which tight rows enter, and so which neighbors a partial
/// budget finds.
pub fn neighbors_seeded(x: &SolutionPoint, budget: &Budget, seed: u64) -> Result<NeighborSet, PivotError> {
    if !is_vertex(x)? {
        return Err(PivotError::NotVertex);
    }
    if budget.work == Some(0) {
        return Ok(NeighborSet {
            points: Vec::new(),
            complete: false,
            work: 0,
        });
    }
    let n = x.n();
    let basis = degree_null_space(n);
    let k = basis.len();
    let m = x.m();

    let mut rows = tight_rows(x);
    if n > DETERMINISTIC_LIMIT {
        rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    // Null-space coordinates of each tight row.
    let h: Vec<Vec<Int>> = rows
        .iter()
        .map(|arcs| (0..k).map(|c| arcs.iter().map(|&a| basis[c][a].clone()).sum()).collect())
        .collect();

    // Pick `k` independent rows for the initial simplicial cone.
    let mut order: Vec<usize> = Vec::with_capacity(h.len());
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
    for (i, row) in h.iter().enumerate() {
        if chosen.len() == k {
            break;
        }
        let mut v: Vec<Rational> = row.iter().map(|e| Rational::from(e.clone())).collect();
        for (lead, e) in &echelon {
            if !v[*lead].is_zero() {
                let f = v[*lead].clone();
                for j in 0..k {
                    if !e[j].is_zero() {
                        let d = &f * &e[j];
                        v[j] -= &d;
                    }
                }
            }
        }
        if let Some(lead) = v.iter().position(|e| !e.is_zero()) {
            let inv = v[lead].recip();
            for e in v.iter_mut() {
                *e *= &inv;
            }
            echelon.push((lead, v));
            chosen.push(i);
        }
    }
    if chosen.len() < k {
        return Err(PivotError::NotVertex);
    }
    order.extend(&chosen);
    order.extend((0..h.len()).filter(|i| !chosen.contains(i)));

    let total_rows = order.len();
    let b: Vec<Vec<Int>> = chosen.iter().map(|&i| h[i].clone()).collect();
    let mut rays: Vec<Ray> = inverse_columns(&b)
        .into_iter()
        .enumerate()
        .map(|(col, v)| {
            let mut zeros = Bits::new(total_rows);
            for pos in 0..k {
                if pos != col {
                    zeros.set(pos);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    let mut meter = Meter {
        budget,
        start: Instant::now(),
        used: 0,
    };
    let mut complete = true;
    'rows: for pos in k..total_rows {
        let row = &h[order[pos]];
        let vals: Vec<Int> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &plus {
            for &q in &minus {
                if !meter.charge() {
                    complete = false;
                    break 'rows;
                }
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 2 < k {
                    continue;
                }
                let adjacent = (0..rays.len()).all(|t| t == p || t == q || !common.subset_of(&rays[t].zeros));
                if !adjacent {
                    continue;
                }
                let v: Vec<Int> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(a, b)| &(&vals[p] * a) - &(&vals[q] * b))
                    .collect();
                let mut zeros = common;
                zeros.set(pos);
                fresh.push(Ray { v: primitive(v), zeros });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_zero() {
                r.zeros.set(pos);
                next.push(r);
            } else if vals[i].is_positive() {
                next.push(r);
            }
        }
        next.extend(fresh);
        rays = next;
    }

    // A ray of an intermediate cone satisfying every row is extreme in the
    // final cone, so a partial run still yields true neighbors.
    let directions: Vec<Vec<Int>> = rays
        .iter()
        .filter(|r| complete || h.iter().all(|row| !dot(row, &r.v).is_negative()))
        .map(|r| {
            let d: Vec<Int> = (0..m)
                .map(|a| {
                    let mut s = Int::ZERO;
                    for (c, coeff) in r.v.iter().enumerate() {
                        if !coeff.is_zero() && !basis[c][a].is_zero() {
                            s += &(coeff * &basis[c][a]);
                        }
                    }
                    s
                })
                .collect();
            primitive(d)
        })
        .collect();

    let mut points: Vec<SolutionPoint> = directions.iter().map(|d| step(x, d)).collect();
    points.sort();
    points.dedup();
    Ok(NeighborSet {
        points,
        complete,
        work: meter.used,
    })
}

/// Moves from `x` along `d` until a non-tight row becomes tight.
fn step(x: &SolutionPoint, d: &[Int]) -> SolutionPoint {
    let n = x.n();
    let (xs, scale) = scaled_weights(x.values());
    let ds: Vec<i128> = d
        .iter()
        .map(|e| e.to_bigint().try_into().expect("direction entry fits in i128"))
        .collect();
    // Largest t·scale, kept as a fraction num/den.
    let mut best: Option<(i128, i128)> = None;
    let mut offer = |num: i128, den: i128| {
        let better = match best {
            None => true,
            Some((bn, bd)) => num * bd < bn * den,
        };
        if better {
            best = Some((num, den));
        }
    };
    for (k, &dk) in ds.iter().enumerate() {
        if dk < 0 {
            offer(xs[k], -dk);
        }
    }
    if n >= 4 {
        let mut cx = vec![0i128; 1usize << n];
        scan_cuts(n, &xs, |s, c| cx[s.bits() as usize] = c).expect("scan within limits");
        scan_cuts(n, &ds, |s, c| {
            if c < 0 && cx[s.bits() as usize] > scale {
                offer(cx[s.bits() as usize] - scale, -c);
            }
        })
        .expect("scan within limits");
    }
    let (num, den) = best.expect("bounded polytope blocks every direction");
    let t = Rational::new(Int::from(num), &Int::from(den) * &Int::from(scale));
    let idx = ArcIndex::new(n);
    let y: Vec<Rational> = (0..idx.m())
        .map(|k| {
            if ds[k] == 0 {
                x.values()[k].clone()
            } else {
                &x.values()[k] + &(&t * &Rational::from(Int::from(ds[k])))
            }
        })
        .collect();
    SolutionPoint::new(n, y).expect("step stays inside the polytope")
}
