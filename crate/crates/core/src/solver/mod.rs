//! LP and MILP solvers.

pub mod bnb;
mod lu;
pub mod oracle;
pub mod simplex;

pub use bnb::{relative_gap, solve_milp, MilpLimits, MilpSolution, MilpStatus, OPTIMAL_GAP};
pub use oracle::{oracle_solve, MAX_ORACLE_BINARIES};
pub use simplex::{solve_lp, LpSolution, LpStatus};
