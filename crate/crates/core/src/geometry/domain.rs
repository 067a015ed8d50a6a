//! Convex bodies in R^n, n ∈ {1, 2, 3}.
//!
//! A domain is a polytope in H-representation, a ball, an ellipse (the image
//! of the unit ball under a symmetric positive matrix), or one of the round
//! shapes clipped by half-spaces. Every shape answers membership, support
//! function, boundary distance and boundary sampling queries.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::vector::{dist, dot, norm, normalized, scale, sub};

/// Relative membership tolerance.
const MEMBERSHIP_EPS: f64 = 1e-12;

/// Closed half-space `normal · x <= offset` with a unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    /// Normalizes `normal` and rescales `offset` accordingly.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 0.0 && n.is_finite() && offset.is_finite()) {
            return Err(Error::InvalidDomain(
                "half-space normal must be nonzero and finite".into(),
            ));
        }
        Ok(Self {
            normal: scale(&normal, 1.0 / n),
            offset: offset / n,
        })
    }

    /// `offset - normal · x`; positive strictly inside.
    #[inline]
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }
}

#[derive(Clone, Debug)]
pub enum Shape {
    Polytope {
        halfspaces: Vec<HalfSpace>,
        vertices: Vec<Vec<f64>>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `{center + matrix · z : |z| <= 1}`.
    Ellipse {
        center: Vec<f64>,
        matrix: DMatrix<f64>,
        inverse: DMatrix<f64>,
    },
    /// A ball or ellipse intersected with extra half-spaces.
    Clipped {
        base: Box<ConvexDomain>,
        cuts: Vec<HalfSpace>,
    },
}

#[derive(Clone, Debug)]
pub struct ConvexDomain {
    dim: usize,
    shape: Shape,
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=3).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

impl ConvexDomain {
    pub fn polytope(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        check_dim(dim)?;
        if halfspaces.is_empty() {
            return Err(Error::InvalidDomain(
                "polytope needs at least one half-space".into(),
            ));
        }
        if halfspaces.iter().any(|h| h.normal.len() != dim) {
            return Err(Error::InvalidDomain(
                "half-space normal has wrong dimension".into(),
            ));
        }
        if has_recession_direction(dim, &halfspaces) {
            return Err(Error::InvalidDomain("polytope is unbounded".into()));
        }
        let vertices = enumerate_vertices(dim, &halfspaces);
        if vertices.len() < dim + 1 {
            return Err(Error::InvalidDomain(
                "polytope is empty or has no interior".into(),
            ));
        }
        Ok(Self {
            dim,
            shape: Shape::Polytope {
                halfspaces,
                vertices,
            },
        })
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let dim = lo.len();
        check_dim(dim)?;
        if hi.len() != dim || lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidDomain(
                "box needs lo < hi in every coordinate".into(),
            ));
        }
        let mut hs = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            hs.push(HalfSpace::new(e.clone(), hi[k])?);
            e[k] = -1.0;
            hs.push(HalfSpace::new(e, -lo[k])?);
        }
        Self::polytope(dim, hs)
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::cuboid(&[a], &[b])
    }

    pub fn ball(center: &[f64], radius: f64) -> Result<Self> {
        check_dim(center.len())?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain("ball radius must be positive".into()));
        }
        Ok(Self {
            dim: center.len(),
            shape: Shape::Ball {
                center: center.to_vec(),
                radius,
            },
        })
    }

    /// Ellipse `{center + matrix · z : |z| <= 1}` for a symmetric positive definite `matrix`.
    pub fn ellipse(center: &[f64], matrix: DMatrix<f64>) -> Result<Self> {
        let dim = center.len();
        check_dim(dim)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidDomain(
                "ellipse matrix has wrong shape".into(),
            ));
        }
        if (&matrix - matrix.transpose()).abs().max() > 1e-12 * matrix.abs().max().max(1.0) {
            return Err(Error::InvalidDomain(
                "ellipse matrix must be symmetric".into(),
            ));
        }
        let eig = SymmetricEigen::new(matrix.clone());
        if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidDomain(
                "ellipse matrix must be positive definite".into(),
            ));
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidDomain("ellipse matrix is singular".into()))?;
        Ok(Self {
            dim,
            shape: Shape::Ellipse {
                center: center.to_vec(),
                matrix,
                inverse,
            },
        })
    }

    /// Planar ellipse with semi-axes `axes` rotated by `angle` radians.
    pub fn ellipse_axes(center: &[f64; 2], axes: [f64; 2], angle: f64) -> Result<Self> {
        if !(axes[0] > 0.0 && axes[1] > 0.0) {
            return Err(Error::InvalidDomain(
                "ellipse semi-axes must be positive".into(),
            ));
        }
        let (s, c) = angle.sin_cos();
        let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let d = DMatrix::from_diagonal(&DVector::from_vec(axes.to_vec()));
        let m = &r * d * r.transpose();
        let m = (&m + m.transpose()) * 0.5;
        Self::ellipse(center, m)
    }

    /// Intersection with `normal · x <= offset`.
    pub fn intersect_halfspace(&self, cut: HalfSpace) -> Result<Self> {
        if cut.normal.len() != self.dim {
            return Err(Error::InvalidDomain("cut has wrong dimension".into()));
        }
        let out = match &self.shape {
            Shape::Polytope { halfspaces, .. } => {
                let mut hs = halfspaces.clone();
                hs.push(cut);
                return Self::polytope(self.dim, hs);
            }
            Shape::Clipped { base, cuts } => {
                let mut cuts = cuts.clone();
                cuts.push(cut);
                Self {
                    dim: self.dim,
                    shape: Shape::Clipped {
                        base: base.clone(),
                        cuts,
                    },
                }
            }
            _ => Self {
                dim: self.dim,
                shape: Shape::Clipped {
                    base: Box::new(self.clone()),
                    cuts: vec![cut],
                },
            },
        };
        if out.interior_point_checked().is_none() {
            return Err(Error::InvalidDomain("clipped domain is empty".into()));
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    fn scale_hint(&self) -> f64 {
        if let Shape::Clipped { base, .. } = &self.shape {
            return base.scale_hint();
        }
        let (lo, hi) = self.bounding_box();
        let mut s: f64 = 1.0;
        for (a, b) in lo.iter().zip(&hi) {
            s = s.max(a.abs()).max(b.abs());
        }
        s
    }

    /// Membership with a small relative tolerance.
    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = MEMBERSHIP_EPS * self.scale_hint();
        self.contains_tol(x, tol)
    }

    pub fn contains_tol(&self, x: &[f64], tol: f64) -> bool {
        match &self.shape {
            Shape::Polytope { halfspaces, .. } => halfspaces.iter().all(|h| h.slack(x) >= -tol),
            Shape::Ball { center, radius } => dist(x, center) <= radius + tol,
            Shape::Ellipse {
                center, inverse, ..
            } => {
                let z = inverse * DVector::from_vec(sub(x, center));
                z.norm() <= 1.0 + tol
            }
            Shape::Clipped { base, cuts } => {
                base.contains_tol(x, tol) && cuts.iter().all(|h| h.slack(x) >= -tol)
            }
        }
    }

    /// Support function `h(u) = max_{x in K} u · x`.
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.shape {
            Shape::Polytope { vertices, .. } => vertices
                .iter()
                .map(|v| dot(u, v))
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::Ball { center, radius } => dot(u, center) + radius * norm(u),
            Shape::Ellipse { center, matrix, .. } => {
                let mu = matrix * DVector::from_column_slice(u);
                dot(u, center) + mu.norm()
            }
            Shape::Clipped { .. } => self
                .clipped_support_candidates(u)
                .iter()
                .map(|p| dot(u, p))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// A maximizer of `u · x` over a round shape.
    fn round_support_point(&self, u: &[f64]) -> Vec<f64> {
        match &self.shape {
            Shape::Ball { center, radius } => match normalized(u) {
                Some(d) => center.iter().zip(&d).map(|(c, e)| c + radius * e).collect(),
                None => center.clone(),
            },
            Shape::Ellipse { center, matrix, .. } => {
                let mu = matrix * DVector::from_column_slice(u);
                let n = mu.norm();
                if n == 0.0 {
                    return center.clone();
                }
                let p = matrix * (mu / n);
                center.iter().zip(p.iter()).map(|(c, e)| c + e).collect()
            }
            _ => unreachable!("round_support_point on a non-round shape"),
        }
    }

    /// Candidate maximizers of a linear functional over a clipped shape.
    /// Exact for n <= 2; ray-cast boundary samples for n = 3.
    fn clipped_support_candidates(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let Shape::Clipped { base, cuts } = &self.shape else {
            unreachable!()
        };
        let tol = 1e-9 * self.scale_hint();
        let mut cand = Vec::new();
        match self.dim {
            1 => {
                let (lo, hi) = self.bounding_box();
                cand.push(lo);
                cand.push(hi);
            }
            2 => {
                cand.push(base.round_support_point(u));
                for h in cuts {
                    cand.extend(base.round_line_intersections(h));
                }
                for a in 0..cuts.len() {
                    for b in a + 1..cuts.len() {
                        if let Some(p) = line_intersection(&cuts[a], &cuts[b]) {
                            cand.push(p);
                        }
                    }
                }
                cand.retain(|p| self.contains_tol(p, tol));
            }
            _ => {
                cand.extend(self.ray_cast_samples(4000));
            }
        }
        cand
    }

    /// Boundary points of a planar round shape on the line `normal · x = offset`.
    fn round_line_intersections(&self, h: &HalfSpace) -> Vec<Vec<f64>> {
        let (center, m) = match &self.shape {
            Shape::Ball { center, radius } => (
                center.clone(),
                DMatrix::from_diagonal_element(2, 2, *radius),
            ),
            Shape::Ellipse { center, matrix, .. } => (center.clone(), matrix.clone()),
            _ => return Vec::new(),
        };
        // z-space: (M n) · z = offset - n · c on the unit circle.
        let w = &m * DVector::from_column_slice(&h.normal);
        let beta = h.offset - dot(&h.normal, &center);
        let w2 = w.norm_squared();
        if w2 == 0.0 || beta * beta > w2 {
            return Vec::new();
        }
        let base = &w * (beta / w2);
        let perp = DVector::from_vec(vec![-w[1], w[0]]) / w2.sqrt();
        let t = (1.0 - beta * beta / w2).max(0.0).sqrt();
        [1.0, -1.0]
            .iter()
            .map(|s| {
                let z = &base + &perp * (s * t);
                let p = &m * z;
                vec![center[0] + p[0], center[1] + p[1]]
            })
            .collect()
    }

    /// `(lo, hi)` from the support function along the coordinate axes.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        if let Shape::Clipped { base, cuts } = &self.shape {
            if self.dim == 1 {
                let (mut lo, mut hi) = base.bounding_box();
                for h in cuts {
                    let bound = h.offset / h.normal[0];
                    if h.normal[0] > 0.0 {
                        hi[0] = hi[0].min(bound);
                    } else {
                        lo[0] = lo[0].max(bound);
                    }
                }
                return (lo, hi);
            }
        }
        let mut lo = vec![0.0; self.dim];
        let mut hi = vec![0.0; self.dim];
        for k in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[k] = 1.0;
            hi[k] = self.support(&e);
            e[k] = -1.0;
            lo[k] = -self.support(&e);
        }
        (lo, hi)
    }

    /// Signed distance to the boundary: exact and positive for interior points,
    /// negative outside (not a true distance there for polytopes).
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Polytope { halfspaces, .. } => halfspaces
                .iter()
                .map(|h| h.slack(x))
                .fold(f64::INFINITY, f64::min),
            Shape::Ball { center, radius } => radius - dist(x, center),
            Shape::Ellipse { .. } => self.ellipse_boundary_distance(x),
            Shape::Clipped { base, cuts } => cuts
                .iter()
                .map(|h| h.slack(x))
                .fold(base.boundary_distance(x), f64::min),
        }
    }

    fn ellipse_boundary_distance(&self, x: &[f64]) -> f64 {
        let Shape::Ellipse {
            center,
            matrix,
            inverse,
        } = &self.shape
        else {
            unreachable!()
        };
        let inside = (inverse * DVector::from_vec(sub(x, center))).norm() <= 1.0;
        let point_at = |z: &[f64]| -> Vec<f64> {
            let p = matrix * DVector::from_column_slice(z);
            center.iter().zip(p.iter()).map(|(c, e)| c + e).collect()
        };
        let d = match self.dim {
            1 => {
                let r = matrix[(0, 0)];
                (dist(x, &[center[0] - r])).min(dist(x, &[center[0] + r]))
            }
            2 => {
                let f = |t: f64| dist(x, &point_at(&[t.cos(), t.sin()]));
                let n = 720;
                let step = std::f64::consts::TAU / n as f64;
                let (mut best_t, mut best) = (0.0, f64::INFINITY);
                for i in 0..n {
                    let t = i as f64 * step;
                    let v = f(t);
                    if v < best {
                        best = v;
                        best_t = t;
                    }
                }
                golden_min(f, best_t - step, best_t + step, 1e-12).1
            }
            _ => fibonacci_sphere(4000)
                .iter()
                .map(|u| dist(x, &point_at(u)))
                .fold(f64::INFINITY, f64::min),
        };
        if inside {
            d
        } else {
            -d
        }
    }

    /// Unit inner normal of the boundary piece closest to `x`.
    pub fn inner_normal(&self, x: &[f64]) -> Vec<f64> {
        let fallback = || {
            let mut e = vec![0.0; self.dim];
            e[0] = 1.0;
            e
        };
        match &self.shape {
            Shape::Polytope { halfspaces, .. } => {
                let h = halfspaces
                    .iter()
                    .min_by(|a, b| a.slack(x).total_cmp(&b.slack(x)))
                    .expect("nonempty half-space list");
                scale(&h.normal, -1.0)
            }
            Shape::Ball { center, .. } => normalized(&sub(center, x)).unwrap_or_else(fallback),
            Shape::Ellipse {
                center, inverse, ..
            } => {
                let g = inverse * inverse * DVector::from_vec(sub(x, center));
                let g: Vec<f64> = g.iter().map(|v| -v).collect();
                normalized(&g).unwrap_or_else(fallback)
            }
            Shape::Clipped { base, cuts } => {
                let (h, s) = cuts
                    .iter()
                    .map(|h| (h, h.slack(x)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("clipped shape has cuts");
                if base.boundary_distance(x) <= s {
                    base.inner_normal(x)
                } else {
                    scale(&h.normal, -1.0)
                }
            }
        }
    }

    /// A point in the interior.
    pub fn interior_point(&self) -> Vec<f64> {
        self.interior_point_checked()
            .expect("validated domains have interior points")
    }

    fn interior_point_checked(&self) -> Option<Vec<f64>> {
        match &self.shape {
            Shape::Polytope { vertices, .. } => {
                let mut c = vec![0.0; self.dim];
                for v in vertices {
                    for (ci, vi) in c.iter_mut().zip(v) {
                        *ci += vi / vertices.len() as f64;
                    }
                }
                Some(c)
            }
            Shape::Ball { center, .. } | Shape::Ellipse { center, .. } => Some(center.clone()),
            Shape::Clipped { base, .. } => {
                let mut pts = base.boundary_samples(64);
                pts.push(base.interior_point());
                pts.retain(|p| self.contains_tol(p, 0.0));
                if pts.len() < 2 {
                    return None;
                }
                let mut c = vec![0.0; self.dim];
                for p in &pts {
                    for (ci, pi) in c.iter_mut().zip(p) {
                        *ci += pi / pts.len() as f64;
                    }
                }
                if self.boundary_distance(&c) > 0.0 {
                    Some(c)
                } else {
                    None
                }
            }
        }
    }

    /// Boundary samples; for n = 2 they are ordered counter-clockwise.
    /// For n = 1 the two endpoints are returned regardless of `count`.
    pub fn boundary_samples(&self, count: usize) -> Vec<Vec<f64>> {
        let count = count.max(3);
        if self.dim == 1 {
            let (lo, hi) = self.bounding_box();
            return vec![lo, hi];
        }
        match (&self.shape, self.dim) {
            (Shape::Ball { .. } | Shape::Ellipse { .. }, 2) => (0..count)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / count as f64;
                    self.round_point(&[t.cos(), t.sin()])
                })
                .collect(),
            (Shape::Ball { .. } | Shape::Ellipse { .. }, _) => fibonacci_sphere(count)
                .iter()
                .map(|u| self.round_point(u))
                .collect(),
            (Shape::Polytope { vertices, .. }, 2) => polygon_perimeter_samples(vertices, count),
            _ => self.ray_cast_samples(count),
        }
    }

    fn round_point(&self, z: &[f64]) -> Vec<f64> {
        match &self.shape {
            Shape::Ball { center, radius } => {
                center.iter().zip(z).map(|(c, e)| c + radius * e).collect()
            }
            Shape::Ellipse { center, matrix, .. } => {
                let p = matrix * DVector::from_column_slice(z);
                center.iter().zip(p.iter()).map(|(c, e)| c + e).collect()
            }
            _ => unreachable!(),
        }
    }

    fn ray_cast_samples(&self, count: usize) -> Vec<Vec<f64>> {
        let p = self.interior_point();
        let dirs: Vec<Vec<f64>> = if self.dim == 2 {
            (0..count)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / count as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect()
        } else {
            fibonacci_sphere(count)
        };
        let reach = {
            let (lo, hi) = match &self.shape {
                Shape::Clipped { base, .. } => base.bounding_box(),
                _ => self.bounding_box(),
            };
            2.0 * dist(&lo, &hi) + 1.0
        };
        dirs.iter()
            .map(|u| {
                let (mut a, mut b) = (0.0, reach);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    let q: Vec<f64> = p.iter().zip(u).map(|(pi, ui)| pi + m * ui).collect();
                    if self.contains_tol(&q, 0.0) {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                p.iter().zip(u).map(|(pi, ui)| pi + a * ui).collect()
            })
            .collect()
    }

    pub fn translated(&self, t: &[f64]) -> Self {
        let shift = |p: &[f64]| -> Vec<f64> { p.iter().zip(t).map(|(a, b)| a + b).collect() };
        let shift_hs = |h: &HalfSpace| HalfSpace {
            normal: h.normal.clone(),
            offset: h.offset + dot(&h.normal, t),
        };
        let shape = match &self.shape {
            Shape::Polytope {
                halfspaces,
                vertices,
            } => Shape::Polytope {
                halfspaces: halfspaces.iter().map(shift_hs).collect(),
                vertices: vertices.iter().map(|v| shift(v)).collect(),
            },
            Shape::Ball { center, radius } => Shape::Ball {
                center: shift(center),
                radius: *radius,
            },
            Shape::Ellipse {
                center,
                matrix,
                inverse,
            } => Shape::Ellipse {
                center: shift(center),
                matrix: matrix.clone(),
                inverse: inverse.clone(),
            },
            Shape::Clipped { base, cuts } => Shape::Clipped {
                base: Box::new(base.translated(t)),
                cuts: cuts.iter().map(shift_hs).collect(),
            },
        };
        Self {
            dim: self.dim,
            shape,
        }
    }

    /// Image under `x -> R x + t` for an orthogonal `rotation` (row-major n×n).
    pub fn rigid_motion(&self, rotation: &DMatrix<f64>, t: &[f64]) -> Self {
        let apply = |p: &[f64]| -> Vec<f64> {
            let q = rotation * DVector::from_column_slice(p);
            q.iter().zip(t).map(|(a, b)| a + b).collect()
        };
        let rot = |v: &[f64]| -> Vec<f64> {
            (rotation * DVector::from_column_slice(v))
                .iter()
                .copied()
                .collect()
        };
        let move_hs = |h: &HalfSpace| {
            let n = rot(&h.normal);
            HalfSpace {
                offset: h.offset + dot(&n, t),
                normal: n,
            }
        };
        let shape = match &self.shape {
            Shape::Polytope {
                halfspaces,
                vertices,
            } => Shape::Polytope {
                halfspaces: halfspaces.iter().map(move_hs).collect(),
                vertices: vertices.iter().map(|v| apply(v)).collect(),
            },
            Shape::Ball { center, radius } => Shape::Ball {
                center: apply(center),
                radius: *radius,
            },
            Shape::Ellipse { center, matrix, .. } => {
                let m = rotation * matrix * rotation.transpose();
                let m = (&m + m.transpose()) * 0.5;
                let inverse = m
                    .clone()
                    .try_inverse()
                    .expect("rotated SPD matrix is invertible");
                Shape::Ellipse {
                    center: apply(center),
                    matrix: m,
                    inverse,
                }
            }
            Shape::Clipped { base, cuts } => Shape::Clipped {
                base: Box::new(base.rigid_motion(rotation, t)),
                cuts: cuts.iter().map(move_hs).collect(),
            },
        };
        Self {
            dim: self.dim,
            shape,
        }
    }

    /// Per-axis extent of the bounding box.
    pub fn extents(&self) -> Vec<f64> {
        let (lo, hi) = self.bounding_box();
        lo.iter().zip(&hi).map(|(a, b)| b - a).collect()
    }
}

fn line_intersection(a: &HalfSpace, b: &HalfSpace) -> Option<Vec<f64>> {
    let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
    if det.abs() < 1e-14 {
        return None;
    }
    let x = (a.offset * b.normal[1] - b.offset * a.normal[1]) / det;
    let y = (a.normal[0] * b.offset - b.normal[0] * a.offset) / det;
    Some(vec![x, y])
}

/// True when some nonzero `d` has `n_k · d <= 0` for all k. Extreme rays of
/// the recession cone lie on intersections of n-1 of the hyperplanes
/// `n_k · d = 0`, so those candidates suffice.
fn has_recession_direction(dim: usize, hs: &[HalfSpace]) -> bool {
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    match dim {
        1 => {
            candidates.push(vec![1.0]);
            candidates.push(vec![-1.0]);
        }
        2 => {
            for h in hs {
                candidates.push(vec![-h.normal[1], h.normal[0]]);
                candidates.push(vec![h.normal[1], -h.normal[0]]);
            }
        }
        _ => {
            let cross = |a: &[f64], b: &[f64]| {
                vec![
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ]
            };
            let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            for (i, a) in hs.iter().enumerate() {
                for b in &hs[i + 1..] {
                    let c = cross(&a.normal, &b.normal);
                    if norm(&c) > 1e-12 {
                        candidates.push(c.clone());
                        candidates.push(scale(&c, -1.0));
                    }
                }
                for e in &axes {
                    let c = cross(&a.normal, e);
                    if norm(&c) > 1e-12 {
                        candidates.push(c.clone());
                        candidates.push(scale(&c, -1.0));
                    }
                }
            }
        }
    }
    candidates.iter().any(|d| {
        let d = normalized(d).unwrap_or_else(|| d.clone());
        hs.iter().all(|h| dot(&h.normal, &d) <= 1e-12)
    })
}

fn enumerate_vertices(dim: usize, hs: &[HalfSpace]) -> Vec<Vec<f64>> {
    let scale_hint = hs.iter().map(|h| h.offset.abs()).fold(1.0, f64::max);
    let feasible = |x: &[f64]| hs.iter().all(|h| h.slack(x) >= -1e-9 * scale_hint);
    let mut out: Vec<Vec<f64>> = Vec::new();
    let push = |x: Vec<f64>, out: &mut Vec<Vec<f64>>| {
        if feasible(&x) && !out.iter().any(|v| dist(v, &x) < 1e-9 * scale_hint) {
            out.push(x);
        }
    };
    let m = hs.len();
    let mut idx = vec![0usize; dim];
    // lexicographic walk over dim-subsets
    fn next_combo(idx: &mut [usize], m: usize) -> bool {
        let k = idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] < m - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    if m < dim {
        return out;
    }
    for (i, v) in idx.iter_mut().enumerate() {
        *v = i;
    }
    loop {
        let a = DMatrix::from_fn(dim, dim, |r, c| hs[idx[r]].normal[c]);
        let b = DVector::from_fn(dim, |r, _| hs[idx[r]].offset);
        if a.determinant().abs() > 1e-12 {
            if let Some(x) = a.lu().solve(&b) {
                push(x.iter().copied().collect(), &mut out);
            }
        }
        if !next_combo(&mut idx, m) {
            break;
        }
    }
    out
}

/// Samples along the perimeter of a convex polygon given by its vertices.
fn polygon_perimeter_samples(vertices: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    let n = vertices.len() as f64;
    let cx = vertices.iter().map(|v| v[0]).sum::<f64>() / n;
    let cy = vertices.iter().map(|v| v[1]).sum::<f64>() / n;
    let mut ordered = vertices.to_vec();
    ordered.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.total_cmp(&tb)
    });
    let perimeter: f64 = (0..ordered.len())
        .map(|i| dist(&ordered[i], &ordered[(i + 1) % ordered.len()]))
        .sum();
    let mut out = Vec::with_capacity(count + ordered.len());
    for i in 0..ordered.len() {
        let a = &ordered[i];
        let b = &ordered[(i + 1) % ordered.len()];
        let pieces = ((count as f64 * dist(a, b) / perimeter).round() as usize).max(1);
        for k in 0..pieces {
            let t = k as f64 / pieces as f64;
            out.push(vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Deterministic near-uniform directions on the unit sphere in R^3.
pub fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * i as f64;
            vec![r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

/// Golden-section minimization on `[a, b]`; returns `(argmin, min)`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
