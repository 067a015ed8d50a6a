use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, WeightedCloud};
use crate::transport::{DualPair, PartialProblem, TransportPlan};
use crate::vector::{dot, norm2};

const SUPPORT_TOL: f64 = 1e-8;

/// A convex function sampled on a cloud, with one supporting slope per sample.
#[derive(Clone, Debug)]
pub struct DiscretePotential {
    pub cloud: WeightedCloud,
    pub values: Vec<f64>,
    pub slopes: Vec<Vec<f64>>,
    /// Every affine support lies below every sample (to 1e-8).
    pub convexified: bool,
    /// Where Monge-Ampère cells are clipped; defaults to the slope bounding box
    /// padded by half a (gradient-stretched) grid step.
    pub gradient_domain: Option<ConvexDomain>,
}

impl DiscretePotential {
    pub fn new(cloud: WeightedCloud, values: Vec<f64>, slopes: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != cloud.len() || slopes.len() != cloud.len() {
            return Err(Error::InvalidInput(
                "potential sizes do not match the cloud".into(),
            ));
        }
        if slopes.iter().any(|s| s.len() != cloud.dim) {
            return Err(Error::InvalidInput("slope has wrong dimension".into()));
        }
        let mut p = Self {
            cloud,
            values,
            slopes,
            convexified: false,
            gradient_domain: None,
        };
        p.convexified = p.support_defect() <= SUPPORT_TOL;
        Ok(p)
    }

    /// Samples `f` with gradient `grad` on the cloud.
    pub fn from_fn(
        cloud: WeightedCloud,
        f: impl Fn(&[f64]) -> f64,
        grad: impl Fn(&[f64]) -> Vec<f64>,
    ) -> Result<Self> {
        let values = cloud.points.iter().map(|y| f(y)).collect();
        let slopes = cloud.points.iter().map(|y| grad(y)).collect();
        Self::new(cloud, values, slopes)
    }

    pub fn with_gradient_domain(mut self, domain: ConvexDomain) -> Self {
        self.gradient_domain = Some(domain);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The affine support `L_i(y) = v_i + s_i · (y - y_i)`.
    #[inline]
    pub fn support(&self, i: usize, y: &[f64]) -> f64 {
        let yi = &self.cloud.points[i];
        self.values[i]
            + self.slopes[i]
                .iter()
                .zip(y.iter().zip(yi))
                .map(|(s, (a, b))| s * (a - b))
                .sum::<f64>()
    }

    /// `max_{i,k} L_i(y_k) - v_k`; nonpositive for a genuine support family.
    pub fn support_defect(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..self.len() {
            for (k, y) in self.cloud.points.iter().enumerate() {
                if k != i {
                    worst = worst.max(self.support(i, y) - self.values[k]);
                }
            }
        }
        if self.len() == 1 {
            0.0
        } else {
            worst
        }
    }

    /// Target-side potential `v = phi` with slopes at the barycentre of matched
    /// sources; unmatched targets sit on the obstacle and get slope `y`.
    /// Cells are clipped to `source_domain`.
    pub fn target_potential(
        problem: &PartialProblem,
        plan: &TransportPlan,
        duals: &DualPair,
        source_domain: Option<&ConvexDomain>,
    ) -> Result<Self> {
        let tgt = &problem.target;
        let slopes = barycentric_slopes(plan, &problem.source, tgt.len(), |e| (e.j, e.i));
        let slopes = slopes
            .into_iter()
            .zip(&tgt.points)
            .map(|(s, y)| s.unwrap_or_else(|| y.clone()))
            .collect();
        let mut p = Self::new(tgt.clone(), duals.phi.clone(), slopes)?;
        p.gradient_domain = source_domain.cloned();
        Ok(p)
    }

    /// Source-side potential `u = psi` with slopes at the barycentre of matched targets.
    pub fn source_potential(
        problem: &PartialProblem,
        plan: &TransportPlan,
        duals: &DualPair,
        target_domain: Option<&ConvexDomain>,
    ) -> Result<Self> {
        let src = &problem.source;
        let slopes = barycentric_slopes(plan, &problem.target, src.len(), |e| (e.i, e.j));
        let slopes = slopes
            .into_iter()
            .zip(&src.points)
            .map(|(s, x)| s.unwrap_or_else(|| x.clone()))
            .collect();
        let mut p = Self::new(src.clone(), duals.psi.clone(), slopes)?;
        p.gradient_domain = target_domain.cloned();
        Ok(p)
    }
}

/// For each owner index, the mass-weighted barycentre of its partners.
pub(crate) fn barycentric_slopes(
    plan: &TransportPlan,
    partners: &WeightedCloud,
    owners: usize,
    key: impl Fn(&crate::transport::PlanEntry) -> (usize, usize),
) -> Vec<Option<Vec<f64>>> {
    let dim = partners.dim;
    let mut acc = vec![vec![0.0; dim]; owners];
    let mut mass = vec![0.0; owners];
    for e in &plan.entries {
        let (o, p) = key(e);
        mass[o] += e.mass;
        for (a, b) in acc[o].iter_mut().zip(&partners.points[p]) {
            *a += e.mass * b;
        }
    }
    acc.into_iter()
        .zip(mass)
        .map(|(a, m)| {
            if m > 0.0 {
                Some(a.iter().map(|v| v / m).collect())
            } else {
                None
            }
        })
        .collect()
}

/// Sup-of-affine extension at each query point.
pub fn extend(potential: &DiscretePotential, query: &[Vec<f64>]) -> Vec<f64> {
    query
        .iter()
        .map(|q| {
            (0..potential.len())
                .map(|i| potential.support(i, q))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Discrete Legendre transform `v*(x) = max_j x·y_j - v_j`.
pub fn legendre(potential: &DiscretePotential, query: &[Vec<f64>]) -> Vec<f64> {
    query
        .iter()
        .map(|x| {
            potential
                .cloud
                .points
                .iter()
                .zip(&potential.values)
                .map(|(y, v)| dot(x, y) - v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Index of the sample attaining the Legendre maximum at `x` (first on ties).
pub fn legendre_argmax(potential: &DiscretePotential, x: &[f64]) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (k, (y, v)) in potential
        .cloud
        .points
        .iter()
        .zip(&potential.values)
        .enumerate()
    {
        let val = dot(x, y) - v;
        if val > best_val {
            best_val = val;
            best = k;
        }
    }
    best
}

/// Excess of `v` over its support plane at `base`: `v(y) - L_base(y)` per sample.
pub fn excess_over_support(potential: &DiscretePotential, base: usize) -> Vec<f64> {
    potential
        .cloud
        .points
        .iter()
        .zip(&potential.values)
        .map(|(y, v)| v - potential.support(base, y))
        .collect()
}

/// `½|y|²` sampled with exact gradients.
pub fn quadratic(cloud: WeightedCloud) -> DiscretePotential {
    DiscretePotential::from_fn(cloud, |y| 0.5 * norm2(y), |y| y.to_vec())
        .expect("quadratic samples are consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{discretize, ConvexDomain};

    fn line(points: &[f64]) -> WeightedCloud {
        WeightedCloud::new(
            points.iter().map(|&p| vec![p]).collect(),
            vec![1.0; points.len()],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn quadratic_extension_reproduces_samples() {
        let sq = ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let p = quadratic(discretize(&sq, |_| 1.0, 12).unwrap());
        assert!(p.convexified);
        let vals = extend(&p, &p.cloud.points);
        for (a, b) in vals.iter().zip(&p.values) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn single_affine_sample_extends_affinely() {
        let p = DiscretePotential::new(line(&[1.0]), vec![2.0], vec![vec![3.0]]).unwrap();
        let q = vec![vec![-4.0], vec![0.0], vec![10.0]];
        assert_eq!(extend(&p, &q), vec![2.0 - 15.0, -1.0, 29.0]);
    }

    #[test]
    fn absolute_value_extension() {
        let p = DiscretePotential::new(
            line(&[-1.0, 0.0, 1.0]),
            vec![1.0, 0.0, 1.0],
            vec![vec![-1.0], vec![0.0], vec![1.0]],
        )
        .unwrap();
        assert_eq!(extend(&p, &[vec![2.0]]), vec![2.0]);
    }

    #[test]
    fn legendre_of_affine_at_slope() {
        // v(y) = 2y + 1 on [-1, 1]; v*(2) = -1
        let c = line(&[-1.0, -0.5, 0.0, 0.5, 1.0]);
        let p = DiscretePotential::from_fn(c, |y| 2.0 * y[0] + 1.0, |_| vec![2.0]).unwrap();
        assert!((legendre(&p, &[vec![2.0]])[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_convex_samples_are_flagged() {
        let p = DiscretePotential::new(
            line(&[-1.0, 0.0, 1.0]),
            vec![0.0, 1.0, 0.0],
            vec![vec![0.0], vec![0.0], vec![0.0]],
        )
        .unwrap();
        assert!(!p.convexified);
    }
}
