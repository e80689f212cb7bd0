//! Exact arithmetic, linear algebra and linear programming.

mod int;
mod lp;
mod matrix;
mod rational;

pub use int::Int;
pub use lp::{solve_lp, solve_lp_with_rows, BasisVar, LazySolution, LinearRow, LpError, LpProblem, LpSolution, LpStatus};
pub use matrix::{bareiss_rank, int_rank, rank_at_least, RatMatrix};
pub use rational::{q, ParseRationalError, Rational};
