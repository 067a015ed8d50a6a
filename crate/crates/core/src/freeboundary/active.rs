use crate::transport::{DualPair, PartialProblem, TransportPlan};

/// Saturation threshold: a point is active once it ships this fraction of its mass.
pub const SATURATION: f64 = 0.99;
/// Disagreement between the two criteria above which a warning is attached.
const AMBIGUITY: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActiveRegion {
    pub side: Side,
    /// Sorted indices of active points.
    pub indices: Vec<usize>,
    /// Transported mass of every point on this side.
    pub mass_carried: Vec<f64>,
    pub active: Vec<bool>,
    /// Fraction of points where saturation and `potential > h + spacing²` agree.
    pub agreement: f64,
    pub warning: Option<String>,
}

impl ActiveRegion {
    pub fn active_mass(&self) -> f64 {
        self.indices.iter().map(|&i| self.mass_carried[i]).sum()
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.active.len()
    }
}

/// Active points by mass saturation, cross-checked against the duals.
pub fn active_region(
    problem: &PartialProblem,
    plan: &TransportPlan,
    duals: &DualPair,
    side: Side,
) -> ActiveRegion {
    let (cloud, potential) = match side {
        Side::Source => (&problem.source, &duals.psi),
        Side::Target => (&problem.target, &duals.phi),
    };
    let mass_carried = match side {
        Side::Source => plan.row_sums(cloud.len()),
        Side::Target => plan.col_sums(cloud.len()),
    };
    let active: Vec<bool> = mass_carried
        .iter()
        .zip(&cloud.weights)
        .map(|(c, w)| *c >= SATURATION * w)
        .collect();
    let tau = cloud.spacing * cloud.spacing;
    let agree = cloud
        .points
        .iter()
        .zip(potential)
        .zip(&active)
        .filter(|((z, p), a)| (**p > duals.obstacle(z) + tau) == **a)
        .count();
    let agreement = agree as f64 / cloud.len() as f64;
    let warning = (1.0 - agreement > AMBIGUITY).then(|| {
        format!(
            "ambiguous active set: criteria disagree on {:.1}% of points",
            100.0 * (1.0 - agreement)
        )
    });
    ActiveRegion {
        side,
        indices: (0..active.len()).filter(|&i| active[i]).collect(),
        mass_carried,
        active,
        agreement,
        warning,
    }
}
