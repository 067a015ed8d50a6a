//! Exact discrete optimal partial transport with quadratic cost, plus a
//! measurement laboratory for the resulting free boundaries: active regions,
//! normals, interior balls, sections of convex potentials, far-apart limits and
//! a two-target partition model.

pub mod asymptotics;
pub mod cli;
pub mod convex_analysis;
pub mod error;
pub mod freeboundary;
pub mod geometry;
pub mod table;
pub mod transport;
pub mod twotarget;
pub mod vector;

pub use error::{Error, Result};
