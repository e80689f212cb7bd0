//! Vertex adjacency and the symmetry-aware exploration of the polytope.

mod bases;
mod cone;
mod explore;

use std::time::Duration;

use thiserror::Error;

use crate::polytope::{PolytopeError, SolutionPoint};

pub use bases::{neighbors_by_bases, Basis, BasisWalk, StandardForm};
pub use cone::{neighbors, neighbors_seeded, DETERMINISTIC_LIMIT};
pub use explore::{enumerate, explore, Event, ExploreConfig, ExploreError, ExploreOutcome, StopReason};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PivotError {
    #[error("point is not a vertex")]
    NotVertex,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Work and wall-clock limits for one neighborhood computation. Work is
/// counted in candidate ray pairs examined.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub work: Option<u64>,
    pub wall: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn work(units: u64) -> Budget {
        Budget {
            work: Some(units),
            wall: None,
        }
    }

    pub fn seconds(s: f64) -> Budget {
        Budget {
            work: None,
            wall: Some(Duration::from_secs_f64(s)),
        }
    }
}

/// Adjacent vertices found within a budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborSet {
    /// Distinct neighbors, sorted.
    pub points: Vec<SolutionPoint>,
    /// False when the budget cut the search short.
    pub complete: bool,
    pub work: u64,
}
