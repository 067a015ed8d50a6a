use thiserror::Error;

/// Errors raised by the solver and the measurement routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("empty discretization: no grid cell meets the domain at resolution {0}")]
    EmptyDiscretization(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate point set: affine hull is not full-dimensional")]
    Degenerate,

    #[error("mass exceeds marginal: requested {requested}, available {available}")]
    MassExceedsMarginal { requested: f64, available: f64 },

    #[error("overlap unsupported: source and target must be disjoint")]
    OverlapUnsupported,

    #[error("network simplex failed: {0}")]
    Solver(String),

    #[error("inconsistent plan: duality gap {gap} exceeds {limit}")]
    InconsistentPlan { gap: f64, limit: f64 },

    #[error("unbalanced section: centre-of-mass offset {offset} after {iterations} iterations")]
    UnbalancedSection { offset: f64, iterations: usize },

    #[error("null section: Monge-Ampere measure vanishes")]
    NullSection,

    #[error("flat at base point: excess below 1e-12 at every radius")]
    FlatAtBasePoint,

    #[error("degenerate normal: displacement vanishes")]
    DegenerateNormal,

    #[error("degenerate interface normal: gradients coincide")]
    DegenerateInterfaceNormal,

    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(usize),

    #[error("domains are not separated along the axis")]
    NotSeparated,

    #[error("unbalanced masses: source {source_mass}, target {target_mass}")]
    UnbalancedMasses { source_mass: f64, target_mass: f64 },

    #[error("empty probe set")]
    EmptyProbeSet,

    #[error("insufficient points: {0}")]
    InsufficientPoints(String),
}

pub type Result<T> = std::result::Result<T, Error>;
