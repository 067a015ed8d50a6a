//! Convex domains, grid discretization, separation distance and affine
//! normalization of point sets.

mod cloud;
mod distance;
pub mod domain;
mod john;

pub use cloud::{discretize, Density, GridInfo, WeightedCloud};
pub use distance::separation_distance;
pub use domain::{ConvexDomain, HalfSpace, Shape};
pub use john::{convex_hull_2d, john_normalize, AffineNormalization};
