//! Grid discretization of densities into weighted point clouds.

use crate::error::{Error, Result};
use crate::geometry::ConvexDomain;
use crate::vector::{dist, dot};

/// Density whitelist shared with the config layer.
#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    Uniform(f64),
    /// `a + b * x[axis]`
    Linear {
        a: f64,
        b: f64,
        axis: usize,
    },
    /// `a + b * |x - center|`
    Radial {
        a: f64,
        b: f64,
        center: Vec<f64>,
    },
}

impl Density {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Density::Uniform(c) => *c,
            Density::Linear { a, b, axis } => a + b * x[*axis],
            Density::Radial { a, b, center } => a + b * dist(x, center),
        }
    }
}

/// Regular-grid bookkeeping kept alongside a discretized cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct GridInfo {
    pub origin: Vec<f64>,
    pub step: f64,
    /// Cells per axis.
    pub shape: Vec<usize>,
    /// Multi-index of the cell each point came from.
    pub cells: Vec<Vec<usize>>,
    /// Whether the cell lies entirely inside the domain.
    pub full: Vec<bool>,
}

impl GridInfo {
    pub fn cell_center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.origin)
            .map(|(&k, o)| o + (k as f64 + 0.5) * self.step)
            .collect()
    }

    /// Linear index of a multi-index, row-major with the last axis fastest.
    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&k, &s)| acc * s + k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCloud {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub total_mass: f64,
    pub spacing: f64,
    pub grid: Option<GridInfo>,
}

impl WeightedCloud {
    /// Cloud from explicit points; `spacing` is the caller's length scale.
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>, spacing: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("cloud has no points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidInput(
                "points and weights differ in length".into(),
            ));
        }
        let dim = points[0].len();
        if points
            .iter()
            .any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::InvalidInput(
                "points must share a dimension and be finite".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput(
                "weights must be nonnegative and finite".into(),
            ));
        }
        let total_mass: f64 = weights.iter().sum();
        if !(total_mass > 0.0) {
            return Err(Error::InvalidInput("cloud has zero total mass".into()));
        }
        Ok(Self {
            dim,
            points,
            weights,
            total_mass,
            spacing,
            grid: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sub-cloud on the given indices, keeping grid bookkeeping.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let weights = indices.iter().map(|&i| self.weights[i]).collect();
        let mut c = Self::new(points, weights, self.spacing)?;
        if let Some(g) = &self.grid {
            c.grid = Some(GridInfo {
                origin: g.origin.clone(),
                step: g.step,
                shape: g.shape.clone(),
                cells: indices.iter().map(|&i| g.cells[i].clone()).collect(),
                full: indices.iter().map(|&i| g.full[i]).collect(),
            });
        }
        Ok(c)
    }

    /// Every point translated by `t`.
    pub fn translated(&self, t: &[f64]) -> Self {
        let mut c = self.clone();
        for p in &mut c.points {
            for (a, b) in p.iter_mut().zip(t) {
                *a += b;
            }
        }
        if let Some(g) = &mut c.grid {
            for (a, b) in g.origin.iter_mut().zip(t) {
                *a += b;
            }
        }
        c
    }

    /// Weighted centre of mass.
    pub fn barycenter(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for (p, w) in self.points.iter().zip(&self.weights) {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += w * pi;
            }
        }
        c.iter().map(|v| v / self.total_mass).collect()
    }

    /// Total weight of the points satisfying `keep`.
    pub fn mass_where(&self, keep: impl Fn(&[f64]) -> bool) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| keep(p))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * dot(p, p))
            .sum()
    }
}

/// Midpoint-rule discretization on a square grid of step `diameter / resolution`,
/// where the diameter is the widest bounding-box extent.
///
/// Cells fully inside the domain contribute their centre with weight
/// `density * step^n`; cells cut by the boundary contribute the centroid of
/// their inside subsamples, weighted by the inside fraction.
pub fn discretize(
    domain: &ConvexDomain,
    density: impl Fn(&[f64]) -> f64,
    resolution: usize,
) -> Result<WeightedCloud> {
    if resolution < 2 {
        return Err(Error::InvalidInput("resolution must be at least 2".into()));
    }
    let dim = domain.dim();
    let (lo, hi) = domain.bounding_box();
    let width = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| b - a)
        .fold(0.0_f64, f64::max);
    let step = width / resolution as f64;
    if !(step > 0.0) {
        return Err(Error::EmptyDiscretization(resolution));
    }
    let shape: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (((b - a) / step) - 1e-9).ceil().max(1.0) as usize)
        .collect();
    let cell_volume = step.powi(dim as i32);
    let sub = match dim {
        1 => 0,
        2 => 8,
        _ => 4,
    };

    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut cells = Vec::new();
    let mut full = Vec::new();

    let total: usize = shape.iter().product();
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        let corner: Vec<f64> = idx
            .iter()
            .zip(&lo)
            .map(|(&k, o)| o + k as f64 * step)
            .collect();
        if let Some((p, frac, is_full)) = cell_sample(domain, &corner, step, sub) {
            let rho = density(&p);
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "density must be positive and finite on the domain, got {rho}"
                )));
            }
            points.push(p);
            weights.push(rho * frac * cell_volume);
            cells.push(idx.clone());
            full.push(is_full);
        }
        // advance the multi-index, last axis fastest
        for k in (0..dim).rev() {
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyDiscretization(resolution));
    }
    let mut cloud = WeightedCloud::new(points, weights, step)?;
    cloud.grid = Some(GridInfo {
        origin: lo,
        step,
        shape,
        cells,
        full,
    });
    Ok(cloud)
}

/// Representative point, inside fraction and fullness of one grid cell.
fn cell_sample(
    domain: &ConvexDomain,
    corner: &[f64],
    step: f64,
    sub: usize,
) -> Option<(Vec<f64>, f64, bool)> {
    let dim = corner.len();
    let center: Vec<f64> = corner.iter().map(|c| c + 0.5 * step).collect();
    if dim == 1 {
        let (lo, hi) = domain.bounding_box();
        let a = corner[0].max(lo[0]);
        let b = (corner[0] + step).min(hi[0]);
        if b - a <= 1e-12 * step {
            return None;
        }
        let frac = ((b - a) / step).min(1.0);
        let is_full = frac >= 1.0 - 1e-12;
        let p = if is_full { center } else { vec![0.5 * (a + b)] };
        return Some((p, if is_full { 1.0 } else { frac }, is_full));
    }

    let n_corners = 1usize << dim;
    let all_corners_inside = (0..n_corners).all(|mask| {
        let c: Vec<f64> = (0..dim)
            .map(|k| corner[k] + if mask >> k & 1 == 1 { step } else { 0.0 })
            .collect();
        domain.contains(&c)
    });
    if all_corners_inside {
        return Some((center, 1.0, true));
    }

    let total = sub.pow(dim as u32);
    let mut inside = 0usize;
    let mut acc = vec![0.0; dim];
    let mut sidx = vec![0usize; dim];
    for _ in 0..total {
        let q: Vec<f64> = (0..dim)
            .map(|k| corner[k] + (sidx[k] as f64 + 0.5) * step / sub as f64)
            .collect();
        if domain.contains(&q) {
            inside += 1;
            for (a, b) in acc.iter_mut().zip(&q) {
                *a += b;
            }
        }
        for k in (0..dim).rev() {
            sidx[k] += 1;
            if sidx[k] < sub {
                break;
            }
            sidx[k] = 0;
        }
    }
    if inside == 0 {
        return None;
    }
    let p: Vec<f64> = acc.iter().map(|a| a / inside as f64).collect();
    Some((p, inside as f64 / total as f64, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_resolution_ten() {
        let sq = ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let c = discretize(&sq, |_| 1.0, 10).unwrap();
        assert_eq!(c.len(), 100);
        assert!((c.total_mass - 1.0).abs() <= 0.02);
        assert!(c.grid.as_ref().unwrap().full.iter().all(|&f| f));
    }

    #[test]
    fn unit_disk_mass_is_pi() {
        let disk = ConvexDomain::ball(&[0.0, 0.0], 1.0).unwrap();
        let c = discretize(&disk, |_| 1.0, 32).unwrap();
        assert!((c.total_mass - std::f64::consts::PI).abs() <= 0.05);
        assert!(c.points.iter().all(|p| disk.contains(p)));
    }

    #[test]
    fn interval_is_exact() {
        let iv = ConvexDomain::interval(-1.0, 0.0).unwrap();
        let c = discretize(&iv, |_| 2.0, 8).unwrap();
        assert_eq!(c.len(), 8);
        assert!((c.total_mass - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn nonpositive_density_is_rejected() {
        let iv = ConvexDomain::interval(-1.0, 0.0).unwrap();
        assert!(matches!(
            discretize(&iv, |_| 0.0, 8),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn low_resolution_is_rejected() {
        let iv = ConvexDomain::interval(0.0, 1.0).unwrap();
        assert!(discretize(&iv, |_| 1.0, 1).is_err());
    }
}
