//! Node relabelings acting on points: canonical forms, automorphisms,
//! stabilizers and orbit bookkeeping.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::exact::Rational;
use crate::polytope::{component_histogram, tight_sets, ArcIndex, SolutionPoint};

/// Own color, then sorted (arc code, neighbor color) pairs out and in.
type Signature = (u32, Vec<(u32, u32)>, Vec<(u32, u32)>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("permutation of {perm} points applied to a point on {point} nodes")]
    SizeMismatch { perm: usize, point: usize },
    #[error("image list is not a bijection on 0..{0}")]
    NotBijection(usize),
}

/// A permutation of `0..n` given by its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    pub fn new(images: Vec<usize>) -> Result<Perm, SymmetryError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(SymmetryError::NotBijection(n));
            }
            seen[v] = true;
        }
        Ok(Perm(images))
    }

    /// Builds a permutation from disjoint cycles; unlisted points are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Perm, SymmetryError> {
        let mut img: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (k, &v) in c.iter().enumerate() {
                if v >= n {
                    return Err(SymmetryError::NotBijection(n));
                }
                img[v] = c[(k + 1) % c.len()];
            }
        }
        Perm::new(img)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&v| self.0[v]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Nontrivial cycles, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for s in 0..self.0.len() {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut v = self.0[s];
            while v != s {
                seen[v] = true;
                c.push(v);
                v = self.0[v];
            }
            if c.len() > 1 {
                out.push(c);
            }
        }
        out
    }

    /// Sorted lengths of all cycles, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let fixed = self.0.iter().enumerate().filter(|(i, v)| i == *v).count();
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.extend(std::iter::repeat_n(1, fixed));
        t.sort_unstable();
        t
    }

    pub fn order(&self) -> usize {
        self.cycles()
            .iter()
            .map(Vec::len)
            .fold(1, |acc, l| acc / gcd(acc, l) * l)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let s: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Relabels nodes: the output satisfies `y[π(i)][π(j)] = x[i][j]`.
pub fn apply(p: &Perm, x: &SolutionPoint) -> Result<SolutionPoint, SymmetryError> {
    if p.len() != x.n() {
        return Err(SymmetryError::SizeMismatch {
            perm: p.len(),
            point: x.n(),
        });
    }
    let idx = x.arc_index();
    let mut y = vec![Rational::ZERO; x.m()];
    for (k, v) in x.values().iter().enumerate() {
        let (i, j) = idx.pair(k);
        y[idx.index(p.image(i), p.image(j))] = v.clone();
    }
    Ok(SolutionPoint::new(x.n(), y).expect("relabeling preserves bounds"))
}

/// Weighted digraph with small integer arc codes, ordered like the values.
struct Coded {
    n: usize,
    code: Vec<Vec<u32>>,
    values: Vec<Rational>,
}

impl Coded {
    fn new(x: &SolutionPoint) -> Coded {
        let n = x.n();
        let distinct: BTreeSet<&Rational> = x.values().iter().collect();
        let values: Vec<Rational> = distinct.into_iter().cloned().collect();
        let idx = x.arc_index();
        let mut code = vec![vec![0u32; n]; n];
        for (k, v) in x.values().iter().enumerate() {
            let (i, j) = idx.pair(k);
            code[i][j] = values.binary_search(v).expect("value present") as u32;
        }
        Coded { n, code, values }
    }

    fn zero_code(&self) -> Option<u32> {
        self.values.binary_search(&Rational::ZERO).ok().map(|c| c as u32)
    }

    /// Refines a coloring to the coarsest equitable one, with colors ranked
    /// by a relabeling-invariant signature.
    fn refine(&self, colors: &mut [u32]) {
        let n = self.n;
        let zero = self.zero_code();
        let mut classes = count_classes(colors);
        loop {
            let sigs: Vec<Signature> = (0..n)
                .map(|v| {
                    let mut out: Vec<(u32, u32)> = Vec::new();
                    let mut inc: Vec<(u32, u32)> = Vec::new();
                    for u in 0..n {
                        if u == v {
                            continue;
                        }
                        if Some(self.code[v][u]) != zero {
                            out.push((self.code[v][u], colors[u]));
                        }
                        if Some(self.code[u][v]) != zero {
                            inc.push((self.code[u][v], colors[u]));
                        }
                    }
                    out.sort_unstable();
                    inc.sort_unstable();
                    (colors[v], out, inc)
                })
                .collect();
            let mut sorted: Vec<&Signature> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            for v in 0..n {
                colors[v] = sorted.binary_search(&&sigs[v]).expect("signature present") as u32;
            }
            let next = sorted.len();
            if next == classes {
                return;
            }
            classes = next;
        }
    }

    /// Flattened code matrix after sending node `u` to position `pos[u]`.
    fn relabeled(&self, pos: &[u32]) -> Vec<u32> {
        let n = self.n;
        let idx = ArcIndex::new(n);
        let mut out = vec![0u32; n * (n - 1)];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out[idx.index(pos[i] as usize, pos[j] as usize)] = self.code[i][j];
                }
            }
        }
        out
    }
}

fn count_classes(colors: &[u32]) -> usize {
    colors.iter().collect::<HashSet<_>>().len()
}

/// Equitable coloring of the unlabeled structure of `x`.
fn refined_colors(g: &Coded) -> Vec<u32> {
    let mut colors = vec![0u32; g.n];
    g.refine(&mut colors);
    colors
}

/// A distinguished representative of an isomorphism class together with a
/// relabeling that produces it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    n: usize,
    values: Vec<Rational>,
    witness: Perm,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The canonical matrix flattened in arc index order.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Relabeling taking the input point to the canonical representative.
    pub fn witness(&self) -> &Perm {
        &self.witness
    }

    pub fn point(&self) -> SolutionPoint {
        SolutionPoint::new(self.n, self.values.clone()).expect("canonical point is valid")
    }

    /// `n=<n>;` followed by the comma-separated canonical values.
    pub fn key(&self) -> String {
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        format!("n={};{}", self.n, vals.join(","))
    }
}

/// Canonical form by individualization and refinement.
///
/// Every node of the first nontrivial cell is individualized in turn and the
/// lexicographically smallest relabeled matrix over all discrete leaves is
/// kept. The leaf set depends only on the isomorphism class, so two points
/// share a canonical form exactly when they are isomorphic.
pub fn canonical(x: &SolutionPoint) -> CanonicalForm {
    let g = Coded::new(x);
    let colors = refined_colors(&g);
    let mut best: Option<(Vec<u32>, Vec<u32>)> = None;
    search_leaves(&g, colors, &mut best);
    let (matrix, pos) = best.expect("search reaches a leaf");
    let values = matrix.iter().map(|&c| g.values[c as usize].clone()).collect();
    CanonicalForm {
        n: x.n(),
        values,
        witness: Perm(pos.into_iter().map(|p| p as usize).collect()),
    }
}

fn search_leaves(g: &Coded, colors: Vec<u32>, best: &mut Option<(Vec<u32>, Vec<u32>)>) {
    let Some((target, members)) = first_nontrivial_cell(&colors) else {
        let m = g.relabeled(&colors);
        if best.as_ref().is_none_or(|(b, _)| m < *b) {
            *best = Some((m, colors));
        }
        return;
    };
    for v in members {
        let mut c: Vec<u32> = colors.iter().map(|&k| 2 * k + 1).collect();
        c[v] = 2 * target;
        g.refine(&mut c);
        search_leaves(g, c, best);
    }
}

fn first_nontrivial_cell(colors: &[u32]) -> Option<(u32, Vec<usize>)> {
    let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        cells.entry(c).or_default().push(v);
    }
    cells.into_iter().find(|(_, m)| m.len() > 1)
}

pub fn is_isomorphic(x: &SolutionPoint, y: &SolutionPoint) -> bool {
    x.n() == y.n() && canonical(x).values == canonical(y).values
}

/// Every relabeling fixing `x`, in lexicographic order of image arrays.
pub fn automorphisms(x: &SolutionPoint) -> Vec<Perm> {
    let g = Coded::new(x);
    let colors = refined_colors(&g);
    let n = g.n;
    let mut img = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut out = Vec::new();
    extend_automorphism(&g, &colors, 0, &mut img, &mut used, &mut out);
    out
}

fn extend_automorphism(
    g: &Coded,
    colors: &[u32],
    v: usize,
    img: &mut [usize],
    used: &mut [bool],
    out: &mut Vec<Perm>,
) {
    let n = g.n;
    if v == n {
        out.push(Perm(img.to_vec()));
        return;
    }
    for w in 0..n {
        if used[w] || colors[w] != colors[v] {
            continue;
        }
        let consistent =
            (0..v).all(|u| g.code[u][v] == g.code[img[u]][w] && g.code[v][u] == g.code[w][img[u]]);
        if !consistent {
            continue;
        }
        img[v] = w;
        used[w] = true;
        extend_automorphism(g, colors, v + 1, img, used, out);
        used[w] = false;
        img[v] = usize::MAX;
    }
}

/// The stabilizer subgroup: its order and a small generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    pub order: usize,
    pub generators: Vec<Perm>,
}

/// Generators are picked greedily, preferring elements of larger order.
pub fn stabilizer(x: &SolutionPoint) -> Stabilizer {
    let mut elements = automorphisms(x);
    let order = elements.len();
    elements.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.cmp(b)));
    let mut generators: Vec<Perm> = Vec::new();
    let mut span: HashSet<Perm> = HashSet::from([Perm::identity(x.n())]);
    for e in elements {
        if span.len() == order {
            break;
        }
        if span.contains(&e) {
            continue;
        }
        generators.push(e);
        span = closure(&generators, x.n());
    }
    Stabilizer { order, generators }
}

/// The subgroup generated by `gens`.
pub fn closure(gens: &[Perm], n: usize) -> HashSet<Perm> {
    let mut seen: HashSet<Perm> = HashSet::from([Perm::identity(n)]);
    let mut frontier = vec![Perm::identity(n)];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = g.compose(&p);
            if seen.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    seen
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn orbit_size(x: &SolutionPoint) -> u128 {
    factorial(x.n()) / stabilizer(x).order as u128
}

/// Summary of one isomorphism class of vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub key: String,
    pub representative: SolutionPoint,
    pub orbit_size: u128,
    pub stabilizer_order: usize,
    pub generators: Vec<Perm>,
    /// Minimum of `x · c` in the gap program; the integrality gap is its inverse.
    pub gap: Option<Rational>,
    pub tight_sets: usize,
    pub histogram: BTreeMap<Rational, usize>,
    pub zero_count: usize,
    pub neighborhood_size: Option<usize>,
}

impl OrbitRecord {
    pub fn from_point(x: &SolutionPoint) -> OrbitRecord {
        let form = canonical(x);
        let rep = form.point();
        let stab = stabilizer(&rep);
        OrbitRecord {
            key: form.key(),
            orbit_size: factorial(rep.n()) / stab.order as u128,
            stabilizer_order: stab.order,
            generators: stab.generators,
            gap: None,
            tight_sets: tight_sets(&rep).len(),
            histogram: component_histogram(&rep),
            zero_count: rep.zero_count(),
            neighborhood_size: None,
            representative: rep,
        }
    }

    pub fn n(&self) -> usize {
        self.representative.n()
    }

    pub fn integrality_gap(&self) -> Option<Rational> {
        self.gap.as_ref().map(Rational::recip)
    }
}

/// Orbit records keyed by canonical form, safe to share between workers.
#[derive(Debug, Default)]
pub struct OrbitRegistry {
    records: Mutex<BTreeMap<String, OrbitRecord>>,
}

impl OrbitRegistry {
    pub fn new() -> OrbitRegistry {
        OrbitRegistry::default()
    }

    /// Inserts unless the key is present; exactly one caller wins per key.
    pub fn insert_if_absent(&self, record: OrbitRecord) -> bool {
        let mut map = self.records.lock().expect("registry lock");
        if map.contains_key(&record.key) {
            return false;
        }
        map.insert(record.key.clone(), record);
        true
    }

    pub fn contains(&self, key: &str) -> bool {
        self.records.lock().expect("registry lock").contains_key(key)
    }

    pub fn get(&self, key: &str) -> Option<OrbitRecord> {
        self.records.lock().expect("registry lock").get(key).cloned()
    }

    pub fn update<F: FnOnce(&mut OrbitRecord)>(&self, key: &str, f: F) -> bool {
        match self.records.lock().expect("registry lock").get_mut(key) {
            Some(r) => {
                f(r);
                true
            }
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.records.lock().expect("registry lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Records in key order.
    pub fn records(&self) -> Vec<OrbitRecord> {
        self.records.lock().expect("registry lock").values().cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_basics() {
        let p = Perm::from_cycles(6, &[&[0, 3], &[1, 4, 2, 5]]).unwrap();
        assert_eq!(p.to_string(), "(0 3)(1 4 2 5)");
        assert_eq!(p.order(), 4);
        assert_eq!(p.cycle_type(), vec![2, 4]);
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(Perm::new(vec![0, 0]), Err(SymmetryError::NotBijection(2)));
    }

    #[test]
    fn size_mismatch() {
        let t = SolutionPoint::tour(&[0, 1, 2]).unwrap();
        assert!(apply(&Perm::identity(4), &t).is_err());
    }

    #[test]
    fn tour_group() {
        let t = SolutionPoint::tour(&[0, 2, 1, 3, 4]).unwrap();
        let s = stabilizer(&t);
        assert_eq!(s.order, 5);
        assert_eq!(s.generators.len(), 1);
        assert_eq!(s.generators[0].order(), 5);
        assert_eq!(orbit_size(&t), 24);
    }

    #[test]
    fn registry_single_winner() {
        let reg = OrbitRegistry::new();
        let r = OrbitRecord::from_point(&SolutionPoint::tour(&[0, 1, 2, 3]).unwrap());
        assert!(reg.insert_if_absent(r.clone()));
        assert!(!reg.insert_if_absent(r));
        assert_eq!(reg.len(), 1);
    }
}
