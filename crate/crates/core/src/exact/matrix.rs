use std::fmt;

use super::int::Int;
use super::rational::Rational;

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RatMatrix {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::ONE);
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> RatMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row);
        }
        RatMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    /// Exact rank.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<Int>> = (0..self.rows).map(|r| integer_row(self.row(r))).collect();
        int_rank(rows, self.cols)
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Scales a rational row by the lcm of its denominators.
pub(crate) fn integer_row(row: &[Rational]) -> Vec<Int> {
    let l = row.iter().fold(Int::ONE, |acc, v| acc.lcm(v.denom()));
    row.iter()
        .map(|v| &(v.numer() * &l) / v.denom())
        .collect()
}

const RANK_PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847];

/// Exact rank of an integer matrix.
///
/// Rank mod p never exceeds the rank over Q, so a modular rank equal to
/// `min(rows, cols)` is already exact. Otherwise fall back to fraction-free
/// Bareiss elimination.
pub fn int_rank(rows: Vec<Vec<Int>>, cols: usize) -> usize {
    let full = rows.len().min(cols);
    if full == 0 {
        return 0;
    }
    for p in RANK_PRIMES {
        if rank_mod_p(&rows, cols, p) == full {
            return full;
        }
    }
    bareiss_rank(rows, cols)
}

/// True iff the rows span a space of dimension at least `target`.
///
/// Rows are reduced incrementally modulo a large prime and the scan stops as
/// soon as `target` independent rows are found. Only when the modular rank
/// falls short is the exact rank computed.
pub fn rank_at_least<I>(rows: I, cols: usize, target: usize) -> bool
where
    I: IntoIterator<Item = Vec<Int>>,
{
    if target == 0 {
        return true;
    }
    let p = RANK_PRIMES[0];
    let pm = p as u128;
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut kept: Vec<Vec<Int>> = Vec::new();
    for row in rows {
        let mut v: Vec<u64> = row.iter().map(|x| reduce_mod(x, p)).collect();
        for (lead, b) in &basis {
            let f = v[*lead] as u128;
            if f == 0 {
                continue;
            }
            for j in 0..cols {
                if b[j] != 0 {
                    let sub = (f * b[j] as u128) % pm;
                    v[j] = ((v[j] as u128 + pm - sub) % pm) as u64;
                }
            }
        }
        kept.push(row);
        if let Some(lead) = v.iter().position(|&e| e != 0) {
            let inv = mod_pow(v[lead], p - 2, p) as u128;
            for e in v.iter_mut() {
                *e = ((*e as u128 * inv) % pm) as u64;
            }
            basis.push((lead, v));
            if basis.len() >= target {
                return true;
            }
        }
    }
    int_rank(kept, cols) >= target
}

fn reduce_mod(v: &Int, p: u64) -> u64 {
    let pm = p as i128;
    match v.as_i64() {
        Some(s) => (s as i128).rem_euclid(pm) as u64,
        None => {
            let r = (v % &Int::from(p)).to_bigint();
            let r: i128 = r.try_into().expect("residue fits");
            r.rem_euclid(pm) as u64
        }
    }
}

fn rank_mod_p(rows: &[Vec<Int>], cols: usize, p: u64) -> usize {
    let pm = p as u128;
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|v| reduce_mod(v, p)).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = mod_pow(m[rank][c], p - 2, p);
        for j in c..cols {
            m[rank][j] = ((m[rank][j] as u128 * inv as u128) % pm) as u64;
        }
        for r in 0..m.len() {
            if r == rank || m[r][c] == 0 {
                continue;
            }
            let f = m[r][c] as u128;
            for j in c..cols {
                let sub = (f * m[rank][j] as u128) % pm;
                m[r][j] = ((m[r][j] as u128 + pm - sub) % pm) as u64;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn mod_pow(b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut base = b as u128 % p as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

/// Fraction-free Gaussian elimination; every division is exact.
pub fn bareiss_rank(mut m: Vec<Vec<Int>>, cols: usize) -> usize {
    let mut rank = 0;
    let mut prev = Int::ONE;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let pivot = m[rank][c].clone();
        for r in rank + 1..m.len() {
            let f = m[r][c].clone();
            for j in c..cols {
                let v = &(&pivot * &m[r][j]) - &(&f * &m[rank][j]);
                m[r][j] = v.div_exact(&prev);
            }
        }
        prev = pivot;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::q;

    #[test]
    fn identity_and_zero_rank() {
        assert_eq!(RatMatrix::identity(3).rank(), 3);
        assert_eq!(RatMatrix::zeros(2, 5).rank(), 0);
        assert_eq!(RatMatrix::zeros(0, 0).rank(), 0);
    }

    #[test]
    fn bareiss_handles_dependent_rows() {
        let m = RatMatrix::from_rows(vec![
            vec![q(1, 2), q(1, 3), q(1, 1)],
            vec![q(1, 1), q(2, 3), q(2, 1)],
            vec![q(0, 1), q(1, 1), q(-1, 1)],
        ]);
        assert_eq!(m.rank(), 2);
        let ints: Vec<Vec<Int>> = (0..3).map(|r| integer_row(m.row(r))).collect();
        assert_eq!(bareiss_rank(ints, 3), 2);
    }

    #[test]
    fn rank_at_least_stops_early_and_falls_back() {
        let rows = |v: &[&[i64]]| -> Vec<Vec<Int>> {
            v.iter().map(|r| r.iter().map(|&e| Int::from(e)).collect()).collect()
        };
        assert!(rank_at_least(rows(&[&[1, 0], &[0, 1], &[1, 1]]), 2, 2));
        assert!(!rank_at_least(rows(&[&[1, 2], &[2, 4]]), 2, 2));
        assert!(rank_at_least(rows(&[&[1, 2], &[2, 4]]), 2, 1));
    }

    #[test]
    fn product_with_identity() {
        let m = RatMatrix::from_rows(vec![vec![q(1, 2), q(3, 4)], vec![q(-1, 1), q(0, 1)]]);
        assert_eq!(m.mul(&RatMatrix::identity(2)), m);
        assert_eq!(m.transpose().transpose(), m);
    }
}
