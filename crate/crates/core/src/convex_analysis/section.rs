//! Sub-level sets and centred sections of sampled convex functions.

use crate::convex_analysis::{extend, ma_measure, DiscretePotential};
use crate::error::{Error, Result};
use crate::geometry::{john_normalize, AffineNormalization};
use crate::vector::{dist, norm, norm2};

const BALANCE_TOL: f64 = 0.05;
const DAMPING: f64 = 0.5;
const MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionKind {
    Centred,
    Sublevel,
}

#[derive(Clone, Debug)]
pub struct Section {
    pub base: usize,
    pub base_point: Vec<f64>,
    pub height: f64,
    /// Slope of the cutting affine function.
    pub slope: Vec<f64>,
    /// Sorted cloud indices.
    pub members: Vec<usize>,
    pub kind: SectionKind,
    /// `None` when the members do not span the space.
    pub normalization: Option<AffineNormalization>,
    /// `|centre of mass - base|` of the members.
    pub center_offset: f64,
    pub diameter: f64,
    pub iterations: usize,
}

impl Section {
    /// Whether an arbitrary point satisfies the defining inequality, using the
    /// extension of the potential off the samples.
    pub fn contains(&self, potential: &DiscretePotential, z: &[f64]) -> bool {
        let v = extend(potential, &[z.to_vec()])[0];
        v < self.cut(potential, z)
    }

    fn cut(&self, potential: &DiscretePotential, z: &[f64]) -> f64 {
        potential.values[self.base]
            + self
                .slope
                .iter()
                .zip(z.iter().zip(&self.base_point))
                .map(|(s, (a, b))| s * (a - b))
                .sum::<f64>()
            + self.height
    }

    pub fn center_of_mass(&self, potential: &DiscretePotential) -> Vec<f64> {
        weighted_center(potential, &self.members)
    }
}

fn weighted_center(p: &DiscretePotential, members: &[usize]) -> Vec<f64> {
    let dim = p.cloud.dim;
    let mut c = vec![0.0; dim];
    let mut w = 0.0;
    for &k in members {
        let wk = p.cloud.weights[k];
        w += wk;
        for (ci, yi) in c.iter_mut().zip(&p.cloud.points[k]) {
            *ci += wk * yi;
        }
    }
    c.iter().map(|v| v / w).collect()
}

fn diameter(p: &DiscretePotential, members: &[usize]) -> f64 {
    let mut d = 0.0_f64;
    for (a, &i) in members.iter().enumerate() {
        for &k in &members[a + 1..] {
            d = d.max(dist(&p.cloud.points[i], &p.cloud.points[k]));
        }
    }
    d
}

fn members_below(p: &DiscretePotential, base: usize, slope: &[f64], h: f64) -> Vec<usize> {
    let y0 = &p.cloud.points[base];
    let v0 = p.values[base];
    (0..p.len())
        .filter(|&k| {
            let y = &p.cloud.points[k];
            let cut = v0
                + slope
                    .iter()
                    .zip(y.iter().zip(y0))
                    .map(|(s, (a, b))| s * (a - b))
                    .sum::<f64>()
                + h;
            k == base || p.values[k] < cut
        })
        .collect()
}

fn build(
    p: &DiscretePotential,
    base: usize,
    h: f64,
    slope: Vec<f64>,
    members: Vec<usize>,
    kind: SectionKind,
    iterations: usize,
) -> Section {
    let pts: Vec<Vec<f64>> = members.iter().map(|&k| p.cloud.points[k].clone()).collect();
    let com = weighted_center(p, &members);
    let base_point = p.cloud.points[base].clone();
    Section {
        base,
        center_offset: dist(&com, &base_point),
        diameter: diameter(p, &members),
        base_point,
        height: h,
        slope,
        normalization: john_normalize(&pts).ok(),
        members,
        kind,
        iterations,
    }
}

/// `{y : v(y) < v(y0) + s0·(y - y0) + h}` with `s0` the stored slope at `y0`.
pub fn sublevel_section(p: &DiscretePotential, base: usize, h: f64) -> Section {
    let slope = p.slopes[base].clone();
    let members = members_below(p, base, &slope, h);
    build(p, base, h, slope, members, SectionKind::Sublevel, 0)
}

/// Section whose members balance around `y0`, found by a damped fixed-point
/// iteration on the cutting slope.
pub fn centred_section(p: &DiscretePotential, base: usize, h: f64) -> Result<Section> {
    centred_section_from(p, base, h, p.slopes[base].clone())
}

/// As [`centred_section`] with an explicit slope seed.
pub fn centred_section_from(
    p: &DiscretePotential,
    base: usize,
    h: f64,
    seed: Vec<f64>,
) -> Result<Section> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(
            "section height must be positive".into(),
        ));
    }
    let n = p.cloud.dim as f64;
    let y0 = p.cloud.points[base].clone();
    let mut slope = seed;
    let mut offset = f64::INFINITY;
    for iter in 0..MAX_ITER {
        let members = members_below(p, base, &slope, h);
        let com = weighted_center(p, &members);
        let delta: Vec<f64> = com.iter().zip(&y0).map(|(a, b)| a - b).collect();
        offset = norm(&delta);
        let diam = diameter(p, &members);
        if offset <= BALANCE_TOL * diam || (members.len() == 1 && offset == 0.0) {
            return Ok(build(
                p,
                base,
                h,
                slope,
                members,
                SectionKind::Centred,
                iter,
            ));
        }
        // For v = ½|y|² the balancing slope is reached in one undamped step;
        // kappa rescales by the section's second moment to match that.
        let spread: f64 = {
            let mut w = 0.0;
            let mut s = 0.0;
            for &k in &members {
                let wk = p.cloud.weights[k];
                w += wk;
                s += wk
                    * norm2(
                        &p.cloud.points[k]
                            .iter()
                            .zip(&com)
                            .map(|(a, b)| a - b)
                            .collect::<Vec<_>>(),
                    );
            }
            s / w
        };
        let kappa = if spread > 0.0 {
            2.0 * h * n / ((n + 2.0) * spread)
        } else {
            1.0
        };
        for (s, d) in slope.iter_mut().zip(&delta) {
            *s -= DAMPING * kappa * d;
        }
    }
    Err(Error::UnbalancedSection {
        offset,
        iterations: MAX_ITER,
    })
}

/// `M_v[½S] / M_v[S]`, with `½S` the dilation by one half about the centre of mass.
pub fn doubling_ratio(p: &DiscretePotential, section: &Section) -> Result<f64> {
    if section.members.is_empty() {
        return Err(Error::NullSection);
    }
    let full = ma_measure(p, &section.members)?;
    if !(full > 1e-14) {
        return Err(Error::NullSection);
    }
    let com = section.center_of_mass(p);
    let half: Vec<usize> = section
        .members
        .iter()
        .copied()
        .filter(|&k| {
            let y = &p.cloud.points[k];
            let z: Vec<f64> = y.iter().zip(&com).map(|(a, c)| c + 2.0 * (a - c)).collect();
            section.contains(p, &z)
        })
        .collect();
    Ok(ma_measure(p, &half)? / full)
}

/// Smallest `b` (on a geometric grid up to 64) such that
/// `S^c_{h/b} ⊂ S_h ⊂ S^c_{bh}` as member sets, maximized over `heights`.
pub fn section_equivalence(p: &DiscretePotential, base: usize, heights: &[f64]) -> Result<f64> {
    let mut worst = 1.0_f64;
    for &h in heights {
        let sub = sublevel_section(p, base, h);
        let mut found = None;
        let mut b = 1.0_f64;
        while b <= 64.0 {
            let inner = centred_section(p, base, h / b)?;
            let outer = centred_section(p, base, h * b)?;
            if is_subset(&inner.members, &sub.members) && is_subset(&sub.members, &outer.members) {
                found = Some(b);
                break;
            }
            b *= 1.25;
        }
        worst = worst.max(found.unwrap_or(f64::INFINITY));
    }
    Ok(worst)
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    // both sorted
    let mut k = 0;
    for &x in a {
        while k < b.len() && b[k] < x {
            k += 1;
        }
        if k == b.len() || b[k] != x {
            return false;
        }
    }
    true
}

/// Index of the sample nearest to `y`.
pub fn nearest_sample(p: &DiscretePotential, y: &[f64]) -> usize {
    let mut best = 0;
    let mut bd = f64::INFINITY;
    for (k, q) in p.cloud.points.iter().enumerate() {
        let d = dist(q, y);
        if d < bd {
            bd = d;
            best = k;
        }
    }
    best
}
