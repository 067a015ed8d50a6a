use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::freeboundary::ActiveRegion;
use crate::transport::{PartialProblem, TransportPlan};
use crate::vector::dist;

const EXHAUSTIVE_LIMIT: usize = 10_000;
const SAMPLES: usize = 1_000_000;
const SEED: u64 = 0x1b_a11;

#[derive(Clone, Debug, PartialEq)]
pub struct BallViolation {
    /// Index into the plan's entries.
    pub entry: usize,
    /// Inactive source point inside the guarded ball.
    pub point: usize,
    /// How far inside the guarded radius the point sits.
    pub depth: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallReport {
    pub violations: usize,
    pub worst: Option<BallViolation>,
    pub pairs_checked: usize,
    pub exhaustive: bool,
}

/// For each support pair `(x, y)`, counts inactive source points `z` with
/// `|z - y| < |x - y| - guard`, where `guard` is two grid steps.
pub fn interior_ball_check(
    problem: &PartialProblem,
    plan: &TransportPlan,
    region: &ActiveRegion,
) -> BallReport {
    interior_ball_check_seeded(problem, plan, region, SEED)
}

/// As [`interior_ball_check`], with an explicit seed for the sampled regime.
pub fn interior_ball_check_seeded(
    problem: &PartialProblem,
    plan: &TransportPlan,
    region: &ActiveRegion,
    seed: u64,
) -> BallReport {
    let src = &problem.source;
    let tgt = &problem.target;
    let guard = 2.0 * src.spacing;
    let inactive: Vec<usize> = (0..src.len()).filter(|&i| !region.active[i]).collect();
    let mut report = BallReport {
        violations: 0,
        worst: None,
        pairs_checked: 0,
        exhaustive: plan.entries.len() <= EXHAUSTIVE_LIMIT,
    };
    if inactive.is_empty() || plan.entries.is_empty() {
        report.pairs_checked = plan.entries.len();
        return report;
    }
    let visit = |entry: usize, z: usize, report: &mut BallReport| {
        let e = &plan.entries[entry];
        let y = &tgt.points[e.j];
        let radius = dist(&src.points[e.i], y) - guard;
        let depth = radius - dist(&src.points[z], y);
        if depth > 0.0 {
            report.violations += 1;
            if report.worst.as_ref().is_none_or(|w| depth > w.depth) {
                report.worst = Some(BallViolation {
                    entry,
                    point: z,
                    depth,
                });
            }
        }
    };
    if report.exhaustive {
        for entry in 0..plan.entries.len() {
            for &z in &inactive {
                visit(entry, z, &mut report);
            }
        }
        report.pairs_checked = plan.entries.len();
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLES {
            let entry = rng.random_range(0..plan.entries.len());
            let z = inactive[rng.random_range(0..inactive.len())];
            visit(entry, z, &mut report);
        }
        report.pairs_checked = SAMPLES;
    }
    report
}
