//! Volume-preserving affine normalization of point sets via the minimum-volume
//! enclosing ellipsoid.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const KHACHIYAN_TOL: f64 = 1e-7;
const KHACHIYAN_MAX_ITER: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct AffineNormalization {
    /// Symmetric, determinant one.
    pub matrix: DMatrix<f64>,
    pub translation: Vec<f64>,
    /// The image of the set lies in `B_outer` and its hull contains `B_{outer/n}`.
    pub outer_radius: f64,
    pub condition_number: f64,
}

impl AffineNormalization {
    /// `x -> A (x - t)`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d =
            DVector::from_iterator(x.len(), x.iter().zip(&self.translation).map(|(a, b)| a - b));
        (&self.matrix * d).iter().copied().collect()
    }

    /// `z -> A^{-1} z + t`.
    pub fn invert(&self, z: &[f64]) -> Vec<f64> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .expect("det-one matrix is invertible");
        let x = inv * DVector::from_column_slice(z);
        x.iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b)
            .collect()
    }

    pub fn inner_radius(&self) -> f64 {
        self.outer_radius / self.matrix.nrows() as f64
    }
}

/// Normalizes `points` so their John ellipsoid becomes a ball centred at the origin.
pub fn john_normalize(points: &[Vec<f64>]) -> Result<AffineNormalization> {
    let n = points.first().map(|p| p.len()).ok_or(Error::Degenerate)?;
    if points.len() < n + 1 || points.iter().any(|p| p.len() != n) {
        return Err(Error::Degenerate);
    }
    check_full_rank(points, n)?;
    let hull = if n == 2 {
        convex_hull_2d(points)
    } else {
        points.to_vec()
    };
    let (center, shape) = khachiyan(&hull, n)?;

    // E = {x : (x-c)^T Q (x-c) <= 1}; Q^{1/2} maps E onto the unit ball.
    let eig = SymmetricEigen::new(shape);
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Degenerate);
    }
    let sqrt_vals = eig.eigenvalues.map(f64::sqrt);
    let q_half =
        &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    let det_half: f64 = sqrt_vals.iter().product();
    let s = det_half.powf(1.0 / n as f64);
    let a = q_half / s;
    let a = (&a + a.transpose()) * 0.5;
    let max = sqrt_vals.max();
    let min = sqrt_vals.min();
    Ok(AffineNormalization {
        matrix: a,
        translation: center,
        outer_radius: 1.0 / s,
        condition_number: max / min,
    })
}

fn check_full_rank(points: &[Vec<f64>], n: usize) -> Result<()> {
    let m = points.len() as f64;
    let mut mean = vec![0.0; n];
    for p in points {
        for (a, b) in mean.iter_mut().zip(p) {
            *a += b / m;
        }
    }
    let mut cov = DMatrix::<f64>::zeros(n, n);
    for p in points {
        for r in 0..n {
            for c in 0..n {
                cov[(r, c)] += (p[r] - mean[r]) * (p[c] - mean[c]) / m;
            }
        }
    }
    let eig = SymmetricEigen::new(cov);
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(max > 0.0) || min <= 1e-12 * max {
        return Err(Error::Degenerate);
    }
    Ok(())
}

/// Khachiyan's algorithm; returns the centre and shape matrix of the enclosing ellipsoid.
fn khachiyan(points: &[Vec<f64>], n: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let m = points.len();
    let d = n as f64;
    let q = DMatrix::from_fn(n + 1, m, |r, c| if r < n { points[c][r] } else { 1.0 });
    let mut u = DVector::from_element(m, 1.0 / m as f64);
    for _ in 0..KHACHIYAN_MAX_ITER {
        let x = &q * DMatrix::from_diagonal(&u) * q.transpose();
        let x_inv = x.try_inverse().ok_or(Error::Degenerate)?;
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for j in 0..m {
            let col = q.column(j);
            let v = (col.transpose() * &x_inv * col)[(0, 0)];
            if v > best_val {
                best_val = v;
                best = j;
            }
        }
        let step = (best_val - d - 1.0) / ((d + 1.0) * (best_val - 1.0));
        let mut next = &u * (1.0 - step);
        next[best] += step;
        let change = (&next - &u).norm();
        u = next;
        if change < KHACHIYAN_TOL {
            break;
        }
    }
    let p = DMatrix::from_fn(n, m, |r, c| points[c][r]);
    let center = &p * &u;
    let second = &p * DMatrix::from_diagonal(&u) * p.transpose() - &center * center.transpose();
    let shape = second.try_inverse().ok_or(Error::Degenerate)? / d;
    let shape = (&shape + shape.transpose()) * 0.5;
    Ok((center.iter().copied().collect(), shape))
}

/// Monotone-chain hull; returns the extreme points.
pub fn convex_hull_2d(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<&Vec<f64>> = points.iter().collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| a[0] == b[0] && a[1] == b[1]);
    if pts.len() < 3 {
        return pts.into_iter().cloned().collect();
    }
    let cross = |o: &[f64], a: &[f64], b: &[f64]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<&Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<&Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.into_iter().chain(upper).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(c: [f64; 2], axes: [f64; 2], k: usize) -> Vec<Vec<f64>> {
        (0..k)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / k as f64;
                vec![c[0] + axes[0] * t.cos(), c[1] + axes[1] * t.sin()]
            })
            .collect()
    }

    #[test]
    fn round_set_gives_identity() {
        let pts = circle([0.3, -0.2], [1.0, 1.0], 400);
        let a = john_normalize(&pts).unwrap();
        let id = DMatrix::<f64>::identity(2, 2);
        assert!((&a.matrix - id).abs().max() < 1e-3);
        assert!((a.translation[0] - 0.3).abs() < 1e-3);
        assert!((a.translation[1] + 0.2).abs() < 1e-3);
    }

    #[test]
    fn ellipse_axes_are_absorbed() {
        let pts = circle([0.0, 0.0], [2.0, 0.5], 400);
        let a = john_normalize(&pts).unwrap();
        let mut ev: Vec<f64> = SymmetricEigen::new(a.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 0.5).abs() < 0.025);
        assert!((ev[1] - 2.0).abs() < 0.1);
        assert!((a.matrix.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn segment_is_degenerate() {
        let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        assert_eq!(john_normalize(&pts), Err(Error::Degenerate));
    }

    #[test]
    fn image_is_sandwiched() {
        let pts = circle([1.0, 1.0], [3.0, 0.7], 200);
        let a = john_normalize(&pts).unwrap();
        let r = a.outer_radius;
        for p in &pts {
            assert!(crate::vector::norm(&a.apply(p)) <= r * (1.0 + 1e-4));
        }
    }
}
