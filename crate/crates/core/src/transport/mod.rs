//! Exact discrete optimal partial transport with cost `|x - y|² / 2`.

mod duals;
mod monotonicity;
mod partial;
pub mod simplex;

pub use duals::{max_feasibility_violation, recover_duals, DualPair};
pub use monotonicity::{cyclical_monotonicity_violation, cyclical_monotonicity_violation_seeded};
pub use partial::{solve_balanced, solve_partial, PartialProblem, PlanEntry, TransportPlan};
