//! Far-apart laboratory: the half-space limit problem, closeness and flatness
//! of the finite-distance solution against it, obliqueness, quadratic
//! deviation and distance sweeps.

mod limit;
mod measures;
mod sweep;

pub(crate) use limit::height_with_mass_above;
pub use limit::{slide_to_limit, LimitProblem};
pub use measures::{
    closeness, flatness, obliqueness_check, quadratic_deviation, ObliquenessReport,
};
pub(crate) use sweep::check_distances;
pub use sweep::{
    max_normal_angle, sweep, sweep_detailed, sweep_row, sweep_row_detailed, sweep_table,
    within_trend, FarApartConfig, Instance, RowArtifacts, SweepRow, SWEEP_COLUMNS,
};
