use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, HalfSpace, WeightedCloud};
use crate::transport::{recover_duals, solve_balanced, DualPair, PartialProblem, TransportPlan};
use crate::vector::{dot, norm, scale};

/// The half-space limit problem: the source above `a` transported onto the
/// target below `b` (heights measured along `axis`), balanced.
#[derive(Clone, Debug)]
pub struct LimitProblem {
    pub axis: Vec<f64>,
    pub a: f64,
    pub b: f64,
    /// `Ω ∩ {x·axis ≥ a}`.
    pub source_domain: ConvexDomain,
    /// `Ω* ∩ {y·axis ≤ b}`.
    pub target_domain: ConvexDomain,
    /// Limit point `k` is point `source_index[k]` of the original source cloud.
    pub source_index: Vec<usize>,
    pub target_index: Vec<usize>,
    pub problem: PartialProblem,
    pub plan: TransportPlan,
    pub duals: DualPair,
}

impl LimitProblem {
    /// Limit target potential at each original target point, `None` outside the cut.
    pub fn target_values(&self, n_target: usize) -> Vec<Option<f64>> {
        let mut out = vec![None; n_target];
        for (k, &j) in self.target_index.iter().enumerate() {
            out[j] = Some(self.duals.phi[k]);
        }
        out
    }

    /// Same for the source potential.
    pub fn source_values(&self, n_source: usize) -> Vec<Option<f64>> {
        let mut out = vec![None; n_source];
        for (k, &i) in self.source_index.iter().enumerate() {
            out[i] = Some(self.duals.psi[k]);
        }
        out
    }

    /// Mass-weighted image of limit target point `k` under the limit plan.
    pub fn target_image(&self, k: usize) -> Option<Vec<f64>> {
        let src = &self.problem.source;
        let mut acc = vec![0.0; src.dim];
        let mut w = 0.0;
        for e in self.plan.entries.iter().filter(|e| e.j == k) {
            for (a, x) in acc.iter_mut().zip(&src.points[e.i]) {
                *a += e.mass * x;
            }
            w += e.mass;
        }
        (w > 0.0).then(|| scale(&acc, 1.0 / w))
    }
}

/// Fraction of a cell of width `s` centred at height `t` lying above `level`.
fn above(t: f64, s: f64, level: f64) -> f64 {
    ((t + 0.5 * s - level) / s).clamp(0.0, 1.0)
}

/// Cell-smoothed height `c` with mass `m` above it.
pub(crate) fn height_with_mass_above(heights: &[f64], weights: &[f64], s: f64, m: f64) -> f64 {
    split_height(heights, weights, s, m, |t, c| above(t, s, c))
}

/// Height `c` with `Σ w · frac(c) = m`, where `frac` is decreasing in `c`.
fn split_height(
    heights: &[f64],
    weights: &[f64],
    s: f64,
    m: f64,
    frac: impl Fn(f64, f64) -> f64,
) -> f64 {
    let lo0 = heights.iter().copied().fold(f64::INFINITY, f64::min) - s;
    let hi0 = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max) + s;
    let mass = |c: f64| -> f64 {
        heights
            .iter()
            .zip(weights)
            .map(|(&t, w)| w * frac(t, c))
            .sum()
    };
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid) > m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Fractional-weight sub-cloud keeping every point with a positive share.
fn cut_cloud(cloud: &WeightedCloud, shares: &[f64]) -> Result<(WeightedCloud, Vec<usize>)> {
    let index: Vec<usize> = (0..cloud.len()).filter(|&i| shares[i] > 0.0).collect();
    let points = index.iter().map(|&i| cloud.points[i].clone()).collect();
    let weights = index
        .iter()
        .map(|&i| cloud.weights[i] * shares[i])
        .collect();
    Ok((WeightedCloud::new(points, weights, cloud.spacing)?, index))
}

/// Splits the masses by thresholds perpendicular to `axis`, clips both domains
/// and solves the balanced problem between the clipped pieces.
pub fn slide_to_limit(
    problem: &PartialProblem,
    source_domain: &ConvexDomain,
    target_domain: &ConvexDomain,
    axis: &[f64],
) -> Result<LimitProblem> {
    let n = norm(axis);
    if !(n > 0.0) || axis.len() != problem.source.dim {
        return Err(Error::InvalidInput(
            "axis must be a nonzero vector of the ambient dimension".into(),
        ));
    }
    let axis = scale(axis, 1.0 / n);
    let top = source_domain.support(&axis);
    let bottom = -target_domain.support(&scale(&axis, -1.0));
    if !(top < bottom) {
        return Err(Error::NotSeparated);
    }
    let (src, tgt, m) = (&problem.source, &problem.target, problem.mass);
    if m > src.total_mass * (1.0 + 1e-12) || m > tgt.total_mass * (1.0 + 1e-12) {
        return Err(Error::MassExceedsMarginal {
            requested: m,
            available: src.total_mass.min(tgt.total_mass),
        });
    }
    let hs: Vec<f64> = src.points.iter().map(|x| dot(x, &axis)).collect();
    let ht: Vec<f64> = tgt.points.iter().map(|y| dot(y, &axis)).collect();
    let (ss, st) = (src.spacing, tgt.spacing);
    let a = split_height(&hs, &src.weights, ss, m, |t, c| above(t, ss, c));
    // target mass below b increases with b; flip heights to reuse the search
    let neg: Vec<f64> = ht.iter().map(|t| -t).collect();
    let b = -split_height(&neg, &tgt.weights, st, m, |t, c| above(t, st, c));

    let src_share: Vec<f64> = hs.iter().map(|&t| above(t, ss, a)).collect();
    let tgt_share: Vec<f64> = ht.iter().map(|&t| 1.0 - above(t, st, b)).collect();
    let (mut lsrc, source_index) = cut_cloud(src, &src_share)?;
    let (mut ltgt, target_index) = cut_cloud(tgt, &tgt_share)?;
    // both sides now carry m up to the bisection resolution; pin them exactly
    for c in [&mut lsrc, &mut ltgt] {
        let r = m / c.total_mass;
        for w in &mut c.weights {
            *w *= r;
        }
        c.total_mass = c.weights.iter().sum();
    }
    let limit = PartialProblem::full(lsrc, ltgt)?;
    let plan = solve_balanced(&limit.source, &limit.target)?;
    let duals = recover_duals(&limit, &plan)?;
    Ok(LimitProblem {
        source_domain: source_domain
            .intersect_halfspace(HalfSpace::new(scale(&axis, -1.0), -a)?)?,
        target_domain: target_domain.intersect_halfspace(HalfSpace::new(axis.clone(), b)?)?,
        axis,
        a,
        b,
        source_index,
        target_index,
        problem: limit,
        plan,
        duals,
    })
}
