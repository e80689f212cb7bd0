pub mod exact;
pub mod fixtures;
pub mod polytope;
pub mod symmetry;
pub mod pivot;
pub mod loops;
pub mod gap;
pub mod io;
