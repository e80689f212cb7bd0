//! Arc indexing, the subtour elimination polytope and its membership tests.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::exact::{rank_at_least, Int, LinearRow, Rational};

/// Largest `n` for which exhaustive subset scans are performed.
pub const MAX_SCAN_NODES: usize = 22;

/// Largest supported node count (node sets are `u32` bitmasks).
pub const MAX_NODES: usize = 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("expected {expected} arc values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("node count {0} is outside the supported range 2..={MAX_NODES}")]
    NodeCount(usize),
    #[error("arc {arc} has value {value} outside [0, 1]")]
    OutOfRange { arc: usize, value: Rational },
    #[error("node {node} out of range for n = {n}")]
    Node { node: usize, n: usize },
    #[error("node set must be a proper nonempty subset")]
    ImproperSet,
    #[error("exhaustive subset scan refused for n = {n} (limit {MAX_SCAN_NODES})")]
    TooLarge { n: usize },
    #[error("point is not a member: {0} violated")]
    NotMember(RowId),
}

/// Bijection between ordered node pairs `(i, j)`, `i != j`, and `0..n(n-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ArcIndex {
    n: usize,
}

impl ArcIndex {
    pub fn new(n: usize) -> ArcIndex {
        ArcIndex { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.n * (self.n - 1)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i != j && i < self.n && j < self.n);
        i * (self.n - 1) + if j < i { j } else { j - 1 }
    }

    #[inline]
    pub fn pair(&self, k: usize) -> (usize, usize) {
        let i = k / (self.n - 1);
        let r = k % (self.n - 1);
        (i, if r < i { r } else { r + 1 })
    }

    /// All arcs in index order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.m()).map(move |k| self.pair(k))
    }
}

/// A subset of nodes as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeSet(pub u32);

impl NodeSet {
    pub fn from_nodes<I: IntoIterator<Item = usize>>(nodes: I) -> NodeSet {
        NodeSet(nodes.into_iter().fold(0u32, |acc, v| acc | (1 << v)))
    }

    pub fn bits(&self) -> u32 {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn complement(&self, n: usize) -> NodeSet {
        NodeSet(!self.0 & full_mask(n))
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |v| bits >> v & 1 == 1)
    }

    /// True for the sets indexing subtour rows: `2 <= |S| <= n - 2`.
    pub fn is_sec(&self, n: usize) -> bool {
        let k = self.len();
        self.0 & !full_mask(n) == 0 && k >= 2 && k + 2 <= n
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<usize> = self.nodes().collect();
        write!(f, "{v:?}")
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.nodes().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// An exact point over the arcs of the complete digraph on `n` nodes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolutionPoint {
    n: usize,
    x: Vec<Rational>,
}

impl SolutionPoint {
    pub fn new(n: usize, x: Vec<Rational>) -> Result<SolutionPoint, PolytopeError> {
        if !(2..=MAX_NODES).contains(&n) {
            return Err(PolytopeError::NodeCount(n));
        }
        let m = n * (n - 1);
        if x.len() != m {
            return Err(PolytopeError::Length { expected: m, got: x.len() });
        }
        if let Some(arc) = x.iter().position(|v| v.is_negative() || *v > Rational::ONE) {
            return Err(PolytopeError::OutOfRange {
                arc,
                value: x[arc].clone(),
            });
        }
        Ok(SolutionPoint { n, x })
    }

    /// Builds a point from explicit arcs; unspecified arcs are zero.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize, Rational)]) -> Result<SolutionPoint, PolytopeError> {
        if !(2..=MAX_NODES).contains(&n) {
            return Err(PolytopeError::NodeCount(n));
        }
        let idx = ArcIndex::new(n);
        let mut x = vec![Rational::ZERO; idx.m()];
        for (i, j, v) in arcs {
            for &node in [i, j] {
                if node >= n {
                    return Err(PolytopeError::Node { node, n });
                }
            }
            if i == j {
                return Err(PolytopeError::Node { node: *i, n });
            }
            x[idx.index(*i, *j)] = v.clone();
        }
        SolutionPoint::new(n, x)
    }

    /// Incidence vector of the cyclic tour visiting `order`.
    pub fn tour(order: &[usize]) -> Result<SolutionPoint, PolytopeError> {
        let n = order.len();
        let arcs: Vec<(usize, usize, Rational)> =
            (0..n).map(|k| (order[k], order[(k + 1) % n], Rational::ONE)).collect();
        SolutionPoint::from_arcs(n, &arcs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn arc_index(&self) -> ArcIndex {
        ArcIndex::new(self.n)
    }

    pub fn values(&self) -> &[Rational] {
        &self.x
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.x
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.x[self.arc_index().index(i, j)]
    }

    pub fn zero_count(&self) -> usize {
        self.x.iter().filter(|v| v.is_zero()).count()
    }

    pub fn is_integral(&self) -> bool {
        self.x.iter().all(Rational::is_integer)
    }

    /// Arcs with positive value, in index order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let idx = self.arc_index();
        (0..self.m()).filter(|&k| !self.x[k].is_zero()).map(|k| idx.pair(k)).collect()
    }

    /// Row-major `n × n` matrix with zero diagonal.
    pub fn to_matrix(&self) -> Vec<Vec<Rational>> {
        let idx = self.arc_index();
        let mut out = vec![vec![Rational::ZERO; self.n]; self.n];
        for (k, v) in self.x.iter().enumerate() {
            let (i, j) = idx.pair(k);
            out[i][j] = v.clone();
        }
        out
    }
}

impl fmt::Debug for SolutionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = self.arc_index();
        let arcs: Vec<String> = (0..self.m())
            .filter(|&k| !self.x[k].is_zero())
            .map(|k| {
                let (i, j) = idx.pair(k);
                format!("{i}->{j}:{}", self.x[k])
            })
            .collect();
        write!(f, "SolutionPoint(n={}; {})", self.n, arcs.join(" "))
    }
}

/// Identifies one row of the constraint system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowId {
    InDegree(usize),
    OutDegree(usize),
    Sec(NodeSet),
    NonNeg(usize),
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowId::InDegree(j) => write!(f, "in-degree row of node {j}"),
            RowId::OutDegree(i) => write!(f, "out-degree row of node {i}"),
            RowId::Sec(s) => write!(f, "subtour row of {s}"),
            RowId::NonNeg(k) => write!(f, "nonnegativity of arc {k}"),
        }
    }
}

/// Row description of the polytope: `n` in-degree rows, `n` out-degree
/// rows, then one subtour row per set in ascending bitmask order.
#[derive(Clone, Copy, Debug)]
pub struct ConstraintSystem {
    n: usize,
}

impl ConstraintSystem {
    pub fn new(n: usize) -> ConstraintSystem {
        ConstraintSystem { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sec_count(&self) -> usize {
        (1usize << self.n) - 2 - 2 * self.n
    }

    /// Subtour sets in ascending bitmask order.
    pub fn sec_sets(&self) -> impl Iterator<Item = NodeSet> {
        let n = self.n;
        (1u32..full_mask(n)).map(NodeSet).filter(move |s| s.is_sec(n))
    }

    /// Degree rows followed by subtour rows.
    pub fn row_ids(&self) -> impl Iterator<Item = RowId> + '_ {
        (0..self.n)
            .map(RowId::InDegree)
            .chain((0..self.n).map(RowId::OutDegree))
            .chain(self.sec_sets().map(RowId::Sec))
    }

    /// Arc indices with coefficient 1 in the given row.
    pub fn row_arcs(&self, row: RowId) -> Vec<usize> {
        let idx = ArcIndex::new(self.n);
        match row {
            RowId::InDegree(j) => (0..self.n).filter(|&i| i != j).map(|i| idx.index(i, j)).collect(),
            RowId::OutDegree(i) => (0..self.n).filter(|&j| j != i).map(|j| idx.index(i, j)).collect(),
            RowId::Sec(s) => cut_arcs(self.n, s),
            RowId::NonNeg(k) => vec![k],
        }
    }

    /// The row as a sparse linear row with its right-hand side.
    pub fn linear_row(&self, row: RowId) -> LinearRow {
        let rhs = match row {
            RowId::NonNeg(_) => Rational::ZERO,
            _ => Rational::ONE,
        };
        LinearRow::new(self.row_arcs(row).into_iter().map(|k| (k, Rational::ONE)).collect(), rhs)
    }
}

/// Arcs leaving `s`.
pub fn cut_arcs(n: usize, s: NodeSet) -> Vec<usize> {
    let idx = ArcIndex::new(n);
    let mut out = Vec::new();
    for i in s.nodes() {
        for j in 0..n {
            if j != i && !s.contains(j) {
                out.push(idx.index(i, j));
            }
        }
    }
    out.sort_unstable();
    out
}

/// `Σ x_ij` over arcs leaving `s`.
pub fn cut_value(x: &SolutionPoint, s: NodeSet) -> Result<Rational, PolytopeError> {
    let n = x.n();
    if s.is_empty() || s.bits() & !full_mask(n) != 0 || s.len() == n {
        return Err(PolytopeError::ImproperSet);
    }
    Ok(cut_arcs(n, s).into_iter().map(|k| &x.values()[k]).sum())
}

/// Values scaled to integers by the lcm of their denominators.
pub(crate) fn scaled_weights(w: &[Rational]) -> (Vec<i128>, i128) {
    let l = w.iter().fold(Int::ONE, |acc, v| acc.lcm(v.denom()));
    let scale: i128 = l.to_bigint().try_into().expect("denominator lcm fits in i128");
    let ints = w
        .iter()
        .map(|v| {
            let s = &(v.numer() * &l) / v.denom();
            s.to_bigint().try_into().expect("scaled weight fits in i128")
        })
        .collect();
    (ints, scale)
}

/// Visits every subtour set together with its scaled cut value, in Gray
/// code order. `weights` are in arc index order.
pub(crate) fn scan_cuts<F>(n: usize, weights: &[i128], mut visit: F) -> Result<(), PolytopeError>
where
    F: FnMut(NodeSet, i128),
{
    if n > MAX_SCAN_NODES {
        return Err(PolytopeError::TooLarge { n });
    }
    let idx = ArcIndex::new(n);
    let mut w = vec![vec![0i128; n]; n];
    for (k, v) in weights.iter().enumerate() {
        let (i, j) = idx.pair(k);
        w[i][j] = *v;
    }
    let mut set: u32 = 0;
    let mut cut: i128 = 0;
    let total: u64 = 1u64 << n;
    for step in 1..total {
        let v = step.trailing_zeros() as usize;
        let bit = 1u32 << v;
        let entering = set & bit == 0;
        let mut into_v = 0i128;
        let mut out_v = 0i128;
        for u in 0..n {
            if u == v {
                continue;
            }
            if set >> u & 1 == 1 {
                into_v += w[u][v];
            } else {
                out_v += w[v][u];
            }
        }
        if entering {
            cut += out_v - into_v;
            set |= bit;
        } else {
            cut += into_v - out_v;
            set &= !bit;
        }
        let s = NodeSet(set);
        if s.is_sec(n) {
            visit(s, cut);
        }
    }
    Ok(())
}

/// Subtour sets whose cut under `w` is below 1, with their cut values, in
/// ascending bitmask order.
pub fn violated_secs(n: usize, w: &[Rational]) -> Result<Vec<(NodeSet, Rational)>, PolytopeError> {
    let (ints, scale) = scaled_weights(w);
    let mut out = Vec::new();
    scan_cuts(n, &ints, |s, c| {
        if c < scale {
            out.push((s, c));
        }
    })?;
    out.sort_by_key(|(s, _)| *s);
    let l = Int::from(scale);
    Ok(out
        .into_iter()
        .map(|(s, c)| (s, Rational::new(Int::from(c), l.clone())))
        .collect())
}

/// Checks degree rows, nonnegativity and every subtour row exactly.
pub fn is_member(x: &SolutionPoint) -> Result<(), RowId> {
    let n = x.n();
    if let Some(k) = x.values().iter().position(Rational::is_negative) {
        return Err(RowId::NonNeg(k));
    }
    let sys = ConstraintSystem::new(n);
    for row in (0..n).map(RowId::InDegree).chain((0..n).map(RowId::OutDegree)) {
        let s: Rational = sys.row_arcs(row).into_iter().map(|k| &x.values()[k]).sum();
        if !s.is_one() {
            return Err(row);
        }
    }
    if n >= 4 {
        let v = violated_secs(n, x.values()).expect("membership scan within limits");
        if let Some((s, _)) = v.first() {
            return Err(RowId::Sec(*s));
        }
    }
    Ok(())
}

/// All subtour sets with cut value exactly 1, ascending by bitmask.
pub fn tight_sets(x: &SolutionPoint) -> Vec<NodeSet> {
    try_tight_sets(x).expect("tight-set scan within limits")
}

pub fn try_tight_sets(x: &SolutionPoint) -> Result<Vec<NodeSet>, PolytopeError> {
    let (ints, scale) = scaled_weights(x.values());
    let mut out = Vec::new();
    scan_cuts(x.n(), &ints, |s, c| {
        if c == scale {
            out.push(s);
        }
    })?;
    out.sort_unstable();
    Ok(out)
}

/// Vertex test: the tight rows must have rank `m`.
///
/// Zero arcs contribute unit rows, so the test reduces to the degree rows
/// and tight subtour rows restricted to the support reaching full rank
/// there.
pub fn is_vertex(x: &SolutionPoint) -> Result<bool, PolytopeError> {
    is_member(x).map_err(PolytopeError::NotMember)?;
    let n = x.n();
    let support: Vec<usize> = (0..x.m()).filter(|&k| !x.values()[k].is_zero()).collect();
    let mut col = vec![usize::MAX; x.m()];
    for (c, &k) in support.iter().enumerate() {
        col[k] = c;
    }
    let sys = ConstraintSystem::new(n);
    let tight = try_tight_sets(x)?;
    let rows = (0..n)
        .map(RowId::InDegree)
        .chain((0..n).map(RowId::OutDegree))
        .chain(tight.into_iter().map(RowId::Sec))
        .map(|r| {
            let mut v = vec![Int::ZERO; support.len()];
            for k in sys.row_arcs(r) {
                if col[k] != usize::MAX {
                    v[col[k]] = Int::ONE;
                }
            }
            v
        });
    Ok(rank_at_least(rows, support.len(), support.len()))
}

/// Multiset of coordinate values.
pub fn component_histogram(x: &SolutionPoint) -> BTreeMap<Rational, usize> {
    let mut h = BTreeMap::new();
    for v in x.values() {
        *h.entry(v.clone()).or_insert(0) += 1;
    }
    h
}

/// All `(n-1)!` tours as node orders starting at 0, in lexicographic order.
pub fn all_tour_orders(n: usize) -> Vec<Vec<usize>> {
    fn rec(order: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if order.len() == n {
            out.push(order.clone());
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                order.push(v);
                rec(order, used, out);
                order.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    used[0] = true;
    rec(&mut vec![0], &mut used, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn arc_index_roundtrip() {
        for n in 2..7 {
            let idx = ArcIndex::new(n);
            let mut seen = vec![false; idx.m()];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let k = idx.index(i, j);
                        assert!(!seen[k]);
                        seen[k] = true;
                        assert_eq!(idx.pair(k), (i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn sec_count_and_order() {
        for n in 4..9 {
            let sys = ConstraintSystem::new(n);
            let sets: Vec<NodeSet> = sys.sec_sets().collect();
            assert_eq!(sets.len(), sys.sec_count());
            assert!(sets.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rejects_bad_points() {
        assert!(matches!(SolutionPoint::new(4, vec![Rational::ZERO; 3]), Err(PolytopeError::Length { .. })));
        let mut v = vec![Rational::ZERO; 12];
        v[0] = q(3, 2);
        assert!(matches!(SolutionPoint::new(4, v), Err(PolytopeError::OutOfRange { arc: 0, .. })));
    }

    #[test]
    fn cut_rejects_improper_sets() {
        let t = SolutionPoint::tour(&[0, 1, 2, 3]).unwrap();
        assert_eq!(cut_value(&t, NodeSet(0)), Err(PolytopeError::ImproperSet));
        assert_eq!(cut_value(&t, NodeSet(0b1111)), Err(PolytopeError::ImproperSet));
    }

    #[test]
    fn zero_vector_fails_degree_rows() {
        let z = SolutionPoint::new(4, vec![Rational::ZERO; 12]).unwrap();
        assert_eq!(is_member(&z), Err(RowId::InDegree(0)));
        assert!(matches!(is_vertex(&z), Err(PolytopeError::NotMember(_))));
    }

    #[test]
    fn scan_refuses_large_n() {
        assert_eq!(scan_cuts(23, &[], |_, _| {}), Err(PolytopeError::TooLarge { n: 23 }));
    }
}
