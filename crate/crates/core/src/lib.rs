//! Charging, discharging and travel planning for an electric delivery fleet
//! trading energy across three priced locations.
//!
//! The optimisation layers are generic over [`scalar::Scalar`]; the aliases
//! below fix them to `f64`, which is what the simulation layer uses.

pub mod data;
pub mod error;
pub mod fleet;
pub mod model;
pub mod report;
pub mod run;
pub mod scalar;
pub mod sim;
pub mod solver;

pub type Instance = model::MilpInstance<f64>;
pub type LpSolution = solver::LpSolution<f64>;
pub type MilpSolution = solver::MilpSolution<f64>;

pub use error::Error;
pub use scalar::Scalar;
