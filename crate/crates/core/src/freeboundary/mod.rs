//! Active regions, free boundaries and their normals, and the interior ball test.

mod active;
pub mod contour;
mod interior_ball;

pub use active::{active_region, ActiveRegion, Side, SATURATION};
pub use interior_ball::{
    interior_ball_check, interior_ball_check_seeded, BallReport, BallViolation,
};

use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, WeightedCloud};
use crate::transport::{DualPair, PartialProblem};
use crate::vector::{dist, dot, norm2, sub};
use contour::{zero_contour_2d, zero_crossings_1d, LatticeField};

/// Vertices within this many grid steps of the fixed boundary are dropped.
pub const BOUNDARY_TRIM: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryVertex {
    pub point: Vec<f64>,
    /// Unit inner normal towards the active side.
    pub normal: Vec<f64>,
    /// Matched point on the other side (the gradient at the vertex).
    pub image: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreeBoundary {
    pub dim: usize,
    /// Ordered polylines (n = 2) or isolated points (n = 1).
    pub components: Vec<Vec<BoundaryVertex>>,
    pub note: Option<String>,
}

impl FreeBoundary {
    pub fn vertices(&self) -> impl Iterator<Item = &BoundaryVertex> {
        self.components.iter().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.components.iter().all(|c| c.is_empty())
    }

    pub fn len(&self) -> usize {
        self.components.iter().map(|c| c.len()).sum()
    }
}

/// `(Du - x) / |Du - x|`.
pub fn fb_normal(x: &[f64], gradient: &[f64]) -> Result<Vec<f64>> {
    let d = sub(gradient, x);
    let n2 = norm2(&d);
    if !(n2.sqrt() > 1e-12) {
        return Err(Error::DegenerateNormal);
    }
    let n = n2.sqrt();
    Ok(d.iter().map(|v| v / n).collect())
}

/// Signed level `max_k (z·w_k - p_k) - h(z)`: the conjugate of the opposite
/// potential minus the obstacle. Nonnegative on the active region.
pub struct LevelFunction<'a> {
    partners: &'a WeightedCloud,
    partner_potential: &'a [f64],
    lambda: f64,
}

impl<'a> LevelFunction<'a> {
    pub fn new(problem: &'a PartialProblem, duals: &'a DualPair, side: Side) -> Self {
        let (partners, partner_potential) = match side {
            Side::Source => (&problem.target, duals.phi.as_slice()),
            Side::Target => (&problem.source, duals.psi.as_slice()),
        };
        Self {
            partners,
            partner_potential,
            lambda: duals.lambda,
        }
    }

    /// Level value and the maximizing partner index.
    pub fn eval(&self, z: &[f64]) -> (f64, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for (k, (w, p)) in self
            .partners
            .points
            .iter()
            .zip(self.partner_potential)
            .enumerate()
        {
            let v = dot(z, w) - p;
            if v > best {
                best = v;
                arg = k;
            }
        }
        (best - 0.5 * (norm2(z) - self.lambda), arg)
    }

    pub fn partner(&self, k: usize) -> &[f64] {
        &self.partners.points[k]
    }
}

/// Zero level set of the signed level function on the lattice of the region's
/// grid cells, trimmed near the fixed boundary, with normals from the matched
/// partner of each vertex.
pub fn extract_free_boundary(
    problem: &PartialProblem,
    region: &ActiveRegion,
    duals: &DualPair,
    domain: &ConvexDomain,
) -> Result<FreeBoundary> {
    let cloud = match region.side {
        Side::Source => &problem.source,
        Side::Target => &problem.target,
    };
    let dim = cloud.dim;
    if dim > 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if region.is_full() {
        return Ok(FreeBoundary {
            dim,
            components: Vec::new(),
            note: Some("no free boundary".into()),
        });
    }
    let grid = cloud
        .grid
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("free-boundary extraction needs a grid cloud".into()))?;
    let level = LevelFunction::new(problem, duals, region.side);
    let field = LatticeField::sample(
        &grid.origin,
        grid.step,
        &grid.shape,
        |p| domain.contains(p),
        |p| level.eval(p).0,
    );
    let raw: Vec<Vec<Vec<f64>>> = if dim == 1 {
        zero_crossings_1d(&field)
            .into_iter()
            .map(|p| vec![p])
            .collect()
    } else {
        zero_contour_2d(&field)
    };
    let trim = BOUNDARY_TRIM * grid.step;
    let mut components = Vec::new();
    for line in raw {
        let mut current: Vec<BoundaryVertex> = Vec::new();
        for p in line {
            if domain.boundary_distance(&p) < trim {
                if !current.is_empty() {
                    components.push(std::mem::take(&mut current));
                }
                continue;
            }
            let (_, k) = level.eval(&p);
            let image = level.partner(k).to_vec();
            let normal = fb_normal(&p, &image)?;
            if current
                .last()
                .is_some_and(|v: &BoundaryVertex| dist(&v.point, &p) == 0.0)
            {
                continue;
            }
            current.push(BoundaryVertex {
                point: p,
                normal,
                image,
            });
        }
        if !current.is_empty() {
            components.push(current);
        }
    }
    let note = if components.is_empty() {
        Some("no interior free boundary".into())
    } else {
        None
    };
    Ok(FreeBoundary {
        dim,
        components,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_normalizes() {
        assert_eq!(fb_normal(&[0.0, 0.0], &[0.0, 3.0]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn normal_is_scale_invariant() {
        let x = [0.3, -0.1];
        let du = [1.7, 2.2];
        let n = fb_normal(&x, &du).unwrap();
        for t in [0.25, 1.0, 8.0] {
            let g: Vec<f64> = x.iter().zip(&du).map(|(a, b)| a + t * (b - a)).collect();
            let m = fb_normal(&x, &g).unwrap();
            for (a, b) in n.iter().zip(&m) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_displacement_is_degenerate() {
        assert_eq!(fb_normal(&[1.0], &[1.0]), Err(Error::DegenerateNormal));
    }
}
