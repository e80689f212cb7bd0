//! λ-loops, loop breaking (n → n+1) and tight-set collapse.

use thiserror::Error;

use crate::exact::Rational;
use crate::polytope::{cut_value, is_vertex, ArcIndex, NodeSet, PolytopeError, SolutionPoint};

/// Largest output size for which vertexhood of a broken loop is asserted.
pub const BREAK_CHECK_LIMIT: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoopError {
    #[error("no λ-loop between nodes {0} and {1}")]
    NoLoop(usize, usize),
    #[error("set {0} is not tight")]
    NotTight(NodeSet),
    #[error("collapse target {0} is not in the set")]
    TargetOutside(usize),
    #[error("broken point is not a vertex")]
    NotVertexAfterBreak,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Arcs `v1 -> v2` with value λ and `v2 -> v1` with value `1 - λ`, both
/// strictly fractional.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaLoop {
    pub v1: usize,
    pub v2: usize,
    pub lambda: Rational,
}

/// All loops, once per pair with `v1 < v2`.
pub fn detect_loops(x: &SolutionPoint) -> Vec<LambdaLoop> {
    let n = x.n();
    let mut out = Vec::new();
    for v1 in 0..n {
        for v2 in v1 + 1..n {
            let a = x.get(v1, v2);
            let b = x.get(v2, v1);
            let fractional = |v: &Rational| v.is_positive() && *v < Rational::ONE;
            if fractional(a) && fractional(b) && (a + b).is_one() {
                out.push(LambdaLoop {
                    v1,
                    v2,
                    lambda: a.clone(),
                });
            }
        }
    }
    out
}

/// Inserts node `n` inside the loop: `v1 -> n -> v2` carries λ and
/// `v2 -> n -> v1` carries `1 - λ`.
pub fn break_loop(x: &SolutionPoint, lp: &LambdaLoop) -> Result<SolutionPoint, LoopError> {
    let n = x.n();
    let (v1, v2) = (lp.v1, lp.v2);
    if v1 >= n || v2 >= n || v1 == v2 || *x.get(v1, v2) != lp.lambda || !(x.get(v1, v2) + x.get(v2, v1)).is_one() {
        return Err(LoopError::NoLoop(v1, v2));
    }
    let lam = lp.lambda.clone();
    if !lam.is_positive() || lam >= Rational::ONE {
        return Err(LoopError::NoLoop(v1, v2));
    }
    let co = Rational::ONE - &lam;
    let v3 = n;
    let idx = ArcIndex::new(n + 1);
    let mut y = vec![Rational::ZERO; idx.m()];
    for (i, j) in x.arc_index().arcs() {
        y[idx.index(i, j)] = x.get(i, j).clone();
    }
    y[idx.index(v1, v2)] = Rational::ZERO;
    y[idx.index(v2, v1)] = Rational::ZERO;
    y[idx.index(v1, v3)] = lam.clone();
    y[idx.index(v3, v2)] = lam;
    y[idx.index(v3, v1)] = co.clone();
    y[idx.index(v2, v3)] = co;
    let out = SolutionPoint::new(n + 1, y)?;
    if n < BREAK_CHECK_LIMIT && !is_vertex(&out)? {
        return Err(LoopError::NotVertexAfterBreak);
    }
    Ok(out)
}

/// One child per detected loop.
pub fn extend_all(x: &SolutionPoint) -> Result<Vec<SolutionPoint>, LoopError> {
    detect_loops(x).iter().map(|l| break_loop(x, l)).collect()
}

/// A tight set to merge and the node whose position the merged node takes
/// (the smallest member when unset).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CollapseSpec {
    pub set: NodeSet,
    pub target: Option<usize>,
}

impl CollapseSpec {
    pub fn new(set: NodeSet) -> CollapseSpec {
        CollapseSpec { set, target: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collapsed {
    pub point: SolutionPoint,
    pub is_vertex: bool,
    /// New label of every old node; members of the set share one label.
    pub mapping: Vec<usize>,
}

/// Merges a tight set into one node; surviving nodes keep their order.
pub fn collapse(x: &SolutionPoint, spec: &CollapseSpec) -> Result<Collapsed, LoopError> {
    let n = x.n();
    let s = spec.set;
    if !cut_value(x, s)?.is_one() {
        return Err(LoopError::NotTight(s));
    }
    let w = spec.target.unwrap_or_else(|| s.nodes().next().expect("nonempty set"));
    if !s.contains(w) {
        return Err(LoopError::TargetOutside(w));
    }
    let mut mapping = vec![0usize; n];
    let mut next = 0;
    for v in 0..n {
        if !s.contains(v) || v == w {
            mapping[v] = next;
            next += 1;
        }
    }
    for v in s.nodes() {
        mapping[v] = mapping[w];
    }
    let n2 = next;
    let idx = ArcIndex::new(n2);
    let mut y = vec![Rational::ZERO; idx.m()];
    for (i, j) in x.arc_index().arcs() {
        let (a, b) = (mapping[i], mapping[j]);
        if a != b {
            y[idx.index(a, b)] += x.get(i, j);
        }
    }
    let point = SolutionPoint::new(n2, y)?;
    let is_vertex = is_vertex(&point)?;
    Ok(Collapsed {
        point,
        is_vertex,
        mapping,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tour_has_no_loops() {
        let t = SolutionPoint::tour(&[0, 2, 1, 3, 4]).unwrap();
        assert!(detect_loops(&t).is_empty());
        assert!(extend_all(&t).unwrap().is_empty());
    }

    #[test]
    fn missing_loop_is_rejected() {
        let t = SolutionPoint::tour(&[0, 1, 2, 3]).unwrap();
        let lp = LambdaLoop {
            v1: 0,
            v2: 1,
            lambda: crate::exact::q(1, 2),
        };
        assert_eq!(break_loop(&t, &lp), Err(LoopError::NoLoop(0, 1)));
    }

    #[test]
    fn collapse_of_tour_is_tour() {
        let t = SolutionPoint::tour(&[0, 1, 2, 3, 4]).unwrap();
        let c = collapse(&t, &CollapseSpec::new(NodeSet::from_nodes([1, 2]))).unwrap();
        assert!(c.is_vertex);
        assert_eq!(c.point, SolutionPoint::tour(&[0, 1, 2, 3]).unwrap());
        assert_eq!(c.mapping, vec![0, 1, 1, 2, 3]);
    }

    #[test]
    fn collapse_rejects_loose_sets() {
        let t = SolutionPoint::tour(&[0, 1, 2, 3, 4]).unwrap();
        let s = NodeSet::from_nodes([0, 2]);
        assert_eq!(collapse(&t, &CollapseSpec::new(s)), Err(LoopError::NotTight(s)));
    }
}
