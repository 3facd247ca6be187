//! Pontryagin-type necessary conditions for fuzzy fractional optimal control
//! problems with generalized Hukuhara Caputo derivatives, with numerical
//! solvers for the resulting per-level boundary value problems.

pub mod bvp;
pub mod frac;
pub mod fuzzy;
pub mod pmp;
pub mod problems;

pub use bvp::{solve_problem, LevelSolution, SolutionBundle, SolveConfig};
pub use frac::FracOrder;
pub use fuzzy::{FuzzyNumber, FuzzyTrajectory, GhCase, LevelGrid, TimeGrid};
pub use pmp::{assemble_pmp_system, check_diameter_feasibility, crisp_reduce, ProblemSpec};
