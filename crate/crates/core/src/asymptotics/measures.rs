use crate::asymptotics::LimitProblem;
use crate::convex_analysis::DiscretePotential;
use crate::error::{Error, Result};
use crate::freeboundary::ActiveRegion;
use crate::geometry::{john_normalize, ConvexDomain, WeightedCloud};
use crate::vector::{dist, dot, norm2, scale, sub};

/// `sup_probe |(v - v(x0)) - (v_lim - v_lim(x0))|`: the potential gap after
/// aligning both at `anchor`. Both slices share one indexing.
pub fn closeness(v: &[f64], v_limit: &[f64], probe: &[usize], anchor: usize) -> Result<f64> {
    if probe.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    if v.len() != v_limit.len() || anchor >= v.len() || probe.iter().any(|&k| k >= v.len()) {
        return Err(Error::InvalidInput(
            "closeness inputs have inconsistent indexing".into(),
        ));
    }
    let shift = v_limit[anchor] - v[anchor];
    Ok(probe
        .iter()
        .map(|&k| (v[k] + shift - v_limit[k]).abs())
        .fold(0.0, f64::max))
}

/// Deviation of `region` from the half-space `{z·axis > level}`:
/// `max(sup{level - t : active}, sup{t - level : inactive, t > level})`, clipped at 0.
pub fn flatness(region: &ActiveRegion, cloud: &WeightedCloud, axis: &[f64], level: f64) -> f64 {
    let mut delta: f64 = 0.0;
    for (z, &act) in cloud.points.iter().zip(&region.active) {
        let t = dot(z, axis);
        if act {
            delta = delta.max(level - t);
        } else if t > level {
            delta = delta.max(t - level);
        }
    }
    delta
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObliquenessReport {
    /// `min ν_Ω(x0) · (-axis)` over sampled contacts.
    pub oblique_min: Option<f64>,
    /// `min (x0 · axis - a)` over the same contacts.
    pub height_min: Option<f64>,
    pub contacts: usize,
    pub note: Option<String>,
}

impl ObliquenessReport {
    /// Contacts sit on the correct side of the cut up to one grid step.
    pub fn heights_ok(&self, spacing: f64) -> bool {
        self.height_min.is_none_or(|h| h >= -spacing)
    }
}

/// Samples the images of the limit target's cut `{y·axis = b}` that land on
/// the fixed boundary of the source domain, and reports how transversally the
/// boundary meets the transport direction there.
pub fn obliqueness_check(limit: &LimitProblem, source_domain: &ConvexDomain) -> ObliquenessReport {
    let tgt = &limit.problem.target;
    let s = tgt.spacing.max(limit.problem.source.spacing);
    let down = scale(&limit.axis, -1.0);
    let mut oblique_min: Option<f64> = None;
    let mut height_min: Option<f64> = None;
    let mut contacts = 0;
    for (k, y) in tgt.points.iter().enumerate() {
        if (dot(y, &limit.axis) - limit.b).abs() > s {
            continue;
        }
        let Some(x0) = limit.target_image(k) else {
            continue;
        };
        if source_domain.boundary_distance(&x0) > s {
            continue;
        }
        contacts += 1;
        let c = dot(&source_domain.inner_normal(&x0), &down);
        let h = dot(&x0, &limit.axis) - limit.a;
        oblique_min = Some(oblique_min.map_or(c, |m| m.min(c)));
        height_min = Some(height_min.map_or(h, |m| m.min(h)));
    }
    ObliquenessReport {
        oblique_min,
        height_min,
        contacts,
        note: (contacts == 0).then(|| "no boundary contact sampled".into()),
    }
}

/// Normalized distance to `½|z|²` near `center`, over the points of `region`
/// within `radius`: subtract the support plane at the centre, map the
/// sub-level set to John position (determinant one), and return
/// `sup |w - ½|A(y - c)|²| / radius²`.
///
/// The sub-level set is located by pushing the samples of the outer half-ball
/// radially onto the level surface (exact for quadratic-along-rays data) and
/// symmetrizing through the centre.
pub fn quadratic_deviation(
    p: &DiscretePotential,
    region: &[usize],
    center: usize,
    radius: f64,
) -> Result<f64> {
    let s = p.cloud.spacing;
    if !(radius >= 3.0 * s * (1.0 - 1e-12)) {
        return Err(Error::InvalidInput(format!(
            "radius {radius} is below three grid steps ({})",
            3.0 * s
        )));
    }
    if center >= p.len() {
        return Err(Error::InvalidInput("centre index out of range".into()));
    }
    let n = p.cloud.dim;
    let c = &p.cloud.points[center];
    let ball: Vec<(Vec<f64>, f64)> = region
        .iter()
        .filter(|&&k| dist(&p.cloud.points[k], c) <= radius * (1.0 + 1e-12))
        .map(|&k| {
            let y = &p.cloud.points[k];
            (sub(y, c), p.values[k] - p.support(center, y))
        })
        .collect();
    if ball.len() < n + 2 {
        return Err(Error::InsufficientPoints(format!(
            "{} samples within radius {radius}",
            ball.len()
        )));
    }
    let level = ball.iter().map(|(_, w)| *w).fold(0.0, f64::max);
    if !(level > 1e-300) {
        return Err(Error::InsufficientPoints(
            "potential is flat on the ball".into(),
        ));
    }
    // only the outer half of the ball: near the centre w is dominated by grid noise
    let mut surface = Vec::new();
    for (d, w) in &ball {
        if *w > 1e-12 * level && norm2(d) >= 0.25 * radius * radius {
            let q = scale(d, (level / w).sqrt());
            surface.push(scale(&q, -1.0));
            surface.push(q);
        }
    }
    let john = john_normalize(&surface)
        .map_err(|_| Error::InsufficientPoints("sub-level set is degenerate".into()))?;
    let dev = ball
        .iter()
        .map(|(d, w)| {
            let z: Vec<f64> = (0..n)
                .map(|r| (0..n).map(|k| john.matrix[(r, k)] * d[k]).sum())
                .collect();
            (w - 0.5 * norm2(&z)).abs()
        })
        .fold(0.0, f64::max);
    Ok(dev / (radius * radius))
}
