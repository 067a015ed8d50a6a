//! Sampled convex potentials: extension, Legendre transform, Monge-Ampère
//! measure, sections, doubling and Hölder-exponent estimates.

mod holder;
mod ma;
mod potential;
mod section;

pub use holder::{holder_exponent, HolderFit};
pub use ma::{cell_volumes, ma_measure};
pub use potential::{
    excess_over_support, extend, legendre, legendre_argmax, quadratic, DiscretePotential,
};
pub use section::{
    centred_section, centred_section_from, doubling_ratio, nearest_sample, section_equivalence,
    sublevel_section, Section, SectionKind,
};
