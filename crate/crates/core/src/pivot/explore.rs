//! Explore-exploit search over orbits of vertices.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::exact::Rational;
use crate::gap::solve_gap;
use crate::loops::{extend_all, LoopError};
use crate::polytope::SolutionPoint;
use crate::symmetry::{canonical, OrbitRecord, OrbitRegistry};

use super::{neighbors_seeded, Budget, PivotError};

#[derive(Clone, Debug, PartialEq)]
pub struct ExploreConfig {
    pub n: usize,
    /// Maximum number of vertices pivoted on.
    pub max_iters: usize,
    pub total_time: Option<Duration>,
    pub per_vertex: Budget,
    pub seed: u64,
    /// Gap-solve every orbit at registration.
    pub solve_gaps: bool,
}

impl ExploreConfig {
    pub fn new(n: usize) -> ExploreConfig {
        ExploreConfig {
            n,
            max_iters: usize::MAX,
            total_time: None,
            per_vertex: Budget::unlimited(),
            seed: 0,
            solve_gaps: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    OrbitRegistered { key: String, zero_count: usize },
    Pivoted { key: String, neighbors: usize, complete: bool },
    GapComputed { key: String, gap: Rational },
    GapFailed { key: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Exhausted,
    MaxIterations,
    TimeLimit,
}

#[derive(Clone, Debug)]
pub struct ExploreOutcome {
    /// Registered orbits in key order.
    pub records: Vec<OrbitRecord>,
    pub iterations: usize,
    pub stop: StopReason,
    /// True when some neighborhood was cut short by the per-vertex budget.
    pub truncated: bool,
}

impl ExploreOutcome {
    /// Number of vertices in the registered orbits.
    pub fn vertex_count(&self) -> u128 {
        self.records.iter().map(|r| r.orbit_size).sum()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExploreError {
    #[error("start point has {got} nodes, expected {n} or {}", n - 1)]
    StartSize { n: usize, got: usize },
    #[error(transparent)]
    Pivot(#[from] PivotError),
    #[error(transparent)]
    Loop(#[from] LoopError),
}

struct Search<'a, F: FnMut(&Event)> {
    registry: OrbitRegistry,
    worklist: BTreeSet<(usize, String)>,
    points: BTreeMap<String, SolutionPoint>,
    cfg: &'a ExploreConfig,
    emit: F,
}

impl<F: FnMut(&Event)> Search<'_, F> {
    /// Registers the orbits of `pts` that are new and gap-solves them.
    fn register(&mut self, pts: Vec<SolutionPoint>) {
        let mut fresh = Vec::new();
        for p in pts {
            let key = canonical(&p).key();
            if self.registry.contains(&key) {
                continue;
            }
            let rec = OrbitRecord::from_point(&p);
            let zeros = rec.zero_count;
            self.registry.insert_if_absent(rec);
            self.worklist.insert((zeros, key.clone()));
            self.points.insert(key.clone(), p.clone());
            (self.emit)(&Event::OrbitRegistered {
                key: key.clone(),
                zero_count: zeros,
            });
            fresh.push((key, p));
        }
        if !self.cfg.solve_gaps {
            return;
        }
        let solved: Vec<(String, Result<Rational, String>)> = fresh
            .into_par_iter()
            .map(|(key, p)| {
                let g = solve_gap(&p).map(|c| c.gap_value).map_err(|e| e.to_string());
                (key, g)
            })
            .collect();
        for (key, g) in solved {
            match g {
                Ok(gap) => {
                    self.registry.update(&key, |r| r.gap = Some(gap.clone()));
                    (self.emit)(&Event::GapComputed { key, gap });
                }
                Err(reason) => (self.emit)(&Event::GapFailed { key, reason }),
            }
        }
    }
}

/// Pivots through the orbits reachable from `starts`, fewest zeros first,
/// ties broken by canonical key. Starts on `n - 1` nodes are extended by
/// breaking each of their loops.
pub fn explore<F: FnMut(&Event)>(
    starts: &[SolutionPoint],
    cfg: &ExploreConfig,
    emit: F,
) -> Result<ExploreOutcome, ExploreError> {
    let began = Instant::now();
    let n = cfg.n;
    let mut initial = Vec::new();
    for s in starts {
        if s.n() == n {
            initial.push(s.clone());
        } else if s.n() + 1 == n {
            initial.extend(extend_all(s)?);
        } else {
            return Err(ExploreError::StartSize { n, got: s.n() });
        }
    }
    let mut search = Search {
        registry: OrbitRegistry::new(),
        worklist: BTreeSet::new(),
        points: BTreeMap::new(),
        cfg,
        emit,
    };
    search.register(initial);

    let mut iterations = 0;
    let mut truncated = false;
    let stop = loop {
        if iterations >= cfg.max_iters {
            break StopReason::MaxIterations;
        }
        if cfg.total_time.is_some_and(|t| began.elapsed() >= t) {
            break StopReason::TimeLimit;
        }
        let Some((_, key)) = search.worklist.pop_first() else {
            break StopReason::Exhausted;
        };
        let x = search.points.remove(&key).expect("worklist entries have points");
        let seed = cfg.seed.wrapping_add((iterations as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let nb = neighbors_seeded(&x, &cfg.per_vertex, seed)?;
        iterations += 1;
        truncated |= !nb.complete;
        if nb.complete {
            search.registry.update(&key, |r| r.neighborhood_size = Some(nb.points.len()));
        }
        (search.emit)(&Event::Pivoted {
            key,
            neighbors: nb.points.len(),
            complete: nb.complete,
        });
        search.register(nb.points);
    };
    Ok(ExploreOutcome {
        records: search.registry.records(),
        iterations,
        stop,
        truncated,
    })
}

/// Complete orbit enumeration from one tour with unbounded budgets.
pub fn enumerate<F: FnMut(&Event)>(n: usize, emit: F) -> Result<ExploreOutcome, ExploreError> {
    let order: Vec<usize> = (0..n).collect();
    let tour = SolutionPoint::tour(&order).map_err(PivotError::from)?;
    explore(&[tour], &ExploreConfig::new(n), emit)
}
