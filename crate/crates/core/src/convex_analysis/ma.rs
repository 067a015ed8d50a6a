//! Monge-Ampère measure of a sampled convex function.
//!
//! The subdifferential of the convex envelope at `y_i` is the Laguerre cell
//! `{p : p·y_i - v_i >= p·y_k - v_k for all k}`; its volume (clipped to the
//! gradient domain) is the measure of the sample.

use crate::convex_analysis::DiscretePotential;
use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Shape};

const ROUND_DOMAIN_SIDES: usize = 256;

/// Total volume of the subgradient cells of `region` (indices into the cloud).
pub fn ma_measure(potential: &DiscretePotential, region: &[usize]) -> Result<f64> {
    if region.is_empty() {
        return Ok(0.0);
    }
    let cells = cell_volumes(potential, Some(region))?;
    Ok(region.iter().map(|&i| cells[i]).sum())
}

/// Subgradient cell volume of every sample, or only of `only` (others left at 0).
pub fn cell_volumes(potential: &DiscretePotential, only: Option<&[usize]>) -> Result<Vec<f64>> {
    let dim = potential.cloud.dim;
    let clip = clip_region(potential)?;
    let mut out = vec![0.0; potential.len()];
    let indices: Vec<usize> = match only {
        Some(r) => r.to_vec(),
        None => (0..potential.len()).collect(),
    };
    for i in indices {
        out[i] = match (&clip, dim) {
            (Clip::Interval(a, b), 1) => interval_cell(potential, i, *a, *b),
            (Clip::Polygon(poly), 2) => polygon_area(&polygon_cell(potential, i, poly.clone())),
            _ => return Err(Error::UnsupportedDimension(dim)),
        };
    }
    Ok(out)
}

enum Clip {
    Interval(f64, f64),
    Polygon(Vec<[f64; 2]>),
}

fn clip_region(potential: &DiscretePotential) -> Result<Clip> {
    let dim = potential.cloud.dim;
    if dim > 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let (lo, hi) = match &potential.gradient_domain {
        Some(d) => {
            if dim == 2 {
                return Ok(Clip::Polygon(domain_polygon(d)));
            }
            d.bounding_box()
        }
        None => {
            // Slope bounding box, padded per axis by half a grid step mapped
            // through the mean slope-to-point stretch (no padding for affine v).
            let (slo, shi) = bounds(&potential.slopes, dim);
            let (plo, phi) = bounds(&potential.cloud.points, dim);
            let mut lo = slo.clone();
            let mut hi = shi.clone();
            for k in 0..dim {
                let stretch = if phi[k] > plo[k] {
                    (shi[k] - slo[k]) / (phi[k] - plo[k])
                } else {
                    0.0
                };
                let pad = 0.5 * potential.cloud.spacing * stretch;
                lo[k] -= pad;
                hi[k] += pad;
            }
            (lo, hi)
        }
    };
    Ok(if dim == 1 {
        Clip::Interval(lo[0], hi[0])
    } else {
        Clip::Polygon(vec![
            [lo[0], lo[1]],
            [hi[0], lo[1]],
            [hi[0], hi[1]],
            [lo[0], hi[1]],
        ])
    })
}

fn bounds(pts: &[Vec<f64>], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in pts {
        for k in 0..dim {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Counter-clockwise outline; round shapes become fine inscribed polygons.
fn domain_polygon(d: &ConvexDomain) -> Vec<[f64; 2]> {
    let pts = match d.shape() {
        Shape::Polytope { .. } => crate::geometry::convex_hull_2d(&d.boundary_samples(8)),
        _ => d.boundary_samples(ROUND_DOMAIN_SIDES),
    };
    let mut poly: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    if signed_area(&poly) < 0.0 {
        poly.reverse();
    }
    poly
}

fn interval_cell(p: &DiscretePotential, i: usize, mut a: f64, mut b: f64) -> f64 {
    let yi = p.cloud.points[i][0];
    let vi = p.values[i];
    for (k, (y, v)) in p.cloud.points.iter().zip(&p.values).enumerate() {
        if k == i {
            continue;
        }
        // p (y_k - y_i) <= v_k - v_i
        let dy = y[0] - yi;
        let dv = v - vi;
        if dy > 0.0 {
            b = b.min(dv / dy);
        } else if dy < 0.0 {
            a = a.max(dv / dy);
        } else if dv < 0.0 {
            return 0.0;
        }
        if b <= a {
            return 0.0;
        }
    }
    b - a
}

fn polygon_cell(p: &DiscretePotential, i: usize, mut poly: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let yi = &p.cloud.points[i];
    let vi = p.values[i];
    for (k, (y, v)) in p.cloud.points.iter().zip(&p.values).enumerate() {
        if k == i {
            continue;
        }
        let n = [y[0] - yi[0], y[1] - yi[1]];
        let c = v - vi;
        if n == [0.0, 0.0] {
            if c < 0.0 {
                return Vec::new();
            }
            continue;
        }
        poly = clip_halfplane(&poly, n, c);
        if poly.len() < 3 {
            return Vec::new();
        }
    }
    poly
}

/// Sutherland-Hodgman step keeping `n · p <= c`.
fn clip_halfplane(poly: &[[f64; 2]], n: [f64; 2], c: f64) -> Vec<[f64; 2]> {
    let side = |q: &[f64; 2]| n[0] * q[0] + n[1] * q[1] - c;
    if poly.iter().all(|q| side(q) <= 0.0) {
        return poly.to_vec();
    }
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let (sa, sb) = (side(&a), side(&b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

fn signed_area(poly: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        0.0
    } else {
        signed_area(poly).abs()
    }
}
