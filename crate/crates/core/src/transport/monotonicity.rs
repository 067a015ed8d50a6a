use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::WeightedCloud;
use crate::transport::TransportPlan;
use crate::vector::dist2;

const EXHAUSTIVE_LIMIT: usize = 10_000;
const SAMPLED_PAIRS: usize = 1_000_000;
const SEED: u64 = 0x5eed_0f_c0ffee;

/// Worst two-cycle gain `|x1-y1|² + |x2-y2|² - |x1-y2|² - |x2-y1|²` over
/// support pairs, clipped below at zero.
pub fn cyclical_monotonicity_violation(
    plan: &TransportPlan,
    source: &WeightedCloud,
    target: &WeightedCloud,
) -> f64 {
    cyclical_monotonicity_violation_seeded(plan, source, target, SEED)
}

/// As [`cyclical_monotonicity_violation`], with an explicit seed for large supports.
pub fn cyclical_monotonicity_violation_seeded(
    plan: &TransportPlan,
    source: &WeightedCloud,
    target: &WeightedCloud,
    seed: u64,
) -> f64 {
    let support: Vec<(&[f64], &[f64])> = plan
        .entries
        .iter()
        .map(|e| (source.points[e.i].as_slice(), target.points[e.j].as_slice()))
        .collect();
    let k = support.len();
    if k < 2 {
        return 0.0;
    }
    let gain = |a: usize, b: usize| {
        let (x1, y1) = support[a];
        let (x2, y2) = support[b];
        dist2(x1, y1) + dist2(x2, y2) - dist2(x1, y2) - dist2(x2, y1)
    };
    let mut worst = 0.0_f64;
    if k <= EXHAUSTIVE_LIMIT {
        for a in 0..k {
            for b in a + 1..k {
                worst = worst.max(gain(a, b));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLED_PAIRS {
            let a = rng.random_range(0..k);
            let b = rng.random_range(0..k);
            worst = worst.max(gain(a, b));
        }
    }
    worst
}
