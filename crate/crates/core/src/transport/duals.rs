//! Kantorovich potentials in the inner-product gauge, with the obstacle level.

use crate::error::{Error, Result};
use crate::transport::partial::{solve_partial, Basis, PartialProblem, TransportPlan};
use crate::vector::{dist2, dot, norm2};

const GAP_TOLERANCE: f64 = 1e-6;

/// `psi(x) + phi(y) >= x·y` with both potentials above `h(z) = (|z|² - lambda)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPair {
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
    pub lambda: f64,
    pub dual_value: f64,
    /// `objective - dual_value`.
    pub gap: f64,
}

impl DualPair {
    pub fn obstacle(&self, z: &[f64]) -> f64 {
        0.5 * (norm2(z) - self.lambda)
    }
}

/// Reads the dual pair off the final basis of `plan` (re-solving if the plan
/// carries none) and checks it against the plan's objective.
pub fn recover_duals(problem: &PartialProblem, plan: &TransportPlan) -> Result<DualPair> {
    let (src, tgt) = (&problem.source, &problem.target);
    let owned;
    let basis = match &plan.basis {
        Some(b) if b.alpha.len() == src.len() && b.beta.len() == tgt.len() => b,
        _ => {
            owned = solve_partial(problem)?
                .basis
                .expect("solver attaches a basis");
            &owned
        }
    };
    let Basis {
        mut alpha,
        mut beta,
        alpha_reservoir: mut ax,
        beta_reservoir: mut by,
    } = basis.clone();

    let max_cost = src
        .points
        .iter()
        .flat_map(|x| tgt.points.iter().map(move |y| 0.5 * dist2(x, y)))
        .fold(0.0_f64, f64::max);
    let amax = alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bmax = beta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // A reservoir with no mass has a free potential; push it down so the obstacle is slack.
    if problem.source_saturated() {
        by = by.min(-amax.max(ax) - max_cost);
    }
    if problem.target_saturated() {
        ax = ax.min(-bmax.max(by) - max_cost);
    }

    // Split so that both reservoirs share one level, -lambda/2.
    let shift = 0.5 * (by - ax);
    for a in &mut alpha {
        *a += shift;
    }
    for b in &mut beta {
        *b -= shift;
    }
    let lambda = -(ax + by);

    let h = |z: &[f64]| 0.5 * (norm2(z) - lambda);
    let psi: Vec<f64> = src
        .points
        .iter()
        .zip(&alpha)
        .map(|(x, a)| (0.5 * norm2(x) - a).max(h(x)))
        .collect();
    let phi: Vec<f64> = tgt
        .points
        .iter()
        .zip(&beta)
        .map(|(y, b)| (0.5 * norm2(y) - b).max(h(y)))
        .collect();

    let (f_tot, g_tot) = (src.total_mass, tgt.total_mass);
    let mut dual_value = lambda * (problem.mass - 0.5 * (f_tot + g_tot));
    for ((x, w), p) in src.points.iter().zip(&src.weights).zip(&psi) {
        dual_value += w * (0.5 * norm2(x) - p);
    }
    for ((y, w), p) in tgt.points.iter().zip(&tgt.weights).zip(&phi) {
        dual_value += w * (0.5 * norm2(y) - p);
    }
    let gap = plan.objective - dual_value;
    let limit = GAP_TOLERANCE * plan.objective.abs().max(f64::MIN_POSITIVE);
    let mass_off = (plan.mass - problem.mass).abs() > 1e-9 * problem.mass;
    if gap.abs() > limit || mass_off {
        return Err(Error::InconsistentPlan { gap, limit });
    }
    Ok(DualPair {
        psi,
        phi,
        lambda,
        dual_value,
        gap,
    })
}

/// Largest violation of `psi(x) + phi(y) >= x·y` over all pairs (positive = violated).
pub fn max_feasibility_violation(problem: &PartialProblem, duals: &DualPair) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for (x, p) in problem.source.points.iter().zip(&duals.psi) {
        for (y, q) in problem.target.points.iter().zip(&duals.phi) {
            worst = worst.max(dot(x, y) - p - q);
        }
    }
    worst
}
