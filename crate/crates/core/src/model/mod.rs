//! Optimisation model: instance container, column layout, builder and export.

pub mod build;
pub mod cost;
pub mod instance;
pub mod mps;
pub mod vars;

pub use build::{build, build_counterfactual, build_with_panel, column, column_map, window_steps, BuildMode};
pub use cost::evaluate_cost;
pub use instance::{MilpInstance, Row, Sense};
pub use mps::{export_mps, to_mps_string, write_mps};
pub use vars::{ColumnMap, VarIndex, VarKind};
