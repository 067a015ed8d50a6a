//! Fixed-mass partial transport via reservoir nodes, and plain balanced transport.

use crate::error::{Error, Result};
use crate::geometry::WeightedCloud;
use crate::transport::simplex::min_cost_flow;
use crate::vector::dist2;

/// Largest integer cost after quantization.
const COST_CEILING: f64 = (1u64 << 40) as f64;
/// Budget for `art * nodes` inside the simplex.
const POTENTIAL_BUDGET: f64 = (1u64 << 58) as f64;
/// Total quantized mass per side.
const MASS_QUANTA: f64 = (1u64 << 50) as f64;

#[derive(Clone, Debug)]
pub struct PartialProblem {
    pub source: WeightedCloud,
    pub target: WeightedCloud,
    pub mass: f64,
}

impl PartialProblem {
    pub fn new(source: WeightedCloud, target: WeightedCloud, mass: f64) -> Result<Self> {
        if source.dim != target.dim {
            return Err(Error::InvalidInput(
                "source and target dimensions differ".into(),
            ));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidInput(
                "transported mass must be positive".into(),
            ));
        }
        let available = source.total_mass.min(target.total_mass);
        if mass > available * (1.0 + 1e-12) {
            return Err(Error::MassExceedsMarginal {
                requested: mass,
                available,
            });
        }
        Ok(Self {
            source,
            target,
            mass: mass.min(available),
        })
    }

    /// Problem transporting the smaller of the two total masses.
    pub fn full(source: WeightedCloud, target: WeightedCloud) -> Result<Self> {
        let m = source.total_mass.min(target.total_mass);
        Self::new(source, target, m)
    }

    pub fn is_balanced(&self) -> bool {
        self.source_saturated() && self.target_saturated()
    }

    pub(crate) fn source_saturated(&self) -> bool {
        self.source.total_mass - self.mass <= 1e-12 * self.source.total_mass
    }

    pub(crate) fn target_saturated(&self) -> bool {
        self.target.total_mass - self.mass <= 1e-12 * self.target.total_mass
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanEntry {
    pub i: usize,
    pub j: usize,
    pub mass: f64,
}

/// Basis potentials in cost units: `alpha_i + beta_j <= c(x_i, y_j)`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Basis {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Potential of the source-side reservoir (absorbs unsent target mass).
    pub alpha_reservoir: f64,
    /// Potential of the target-side reservoir (absorbs unsent source mass).
    pub beta_reservoir: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportPlan {
    /// Sorted by `(i, j)`.
    pub entries: Vec<PlanEntry>,
    pub objective: f64,
    pub mass: f64,
    /// Mass routed between the two reservoirs; zero for disjoint supports.
    pub reservoir_mass: f64,
    pub(crate) basis: Option<Basis>,
}

impl TransportPlan {
    /// A plan from explicit entries, e.g. for checking a hand-built coupling.
    pub fn from_entries(
        mut entries: Vec<PlanEntry>,
        source: &WeightedCloud,
        target: &WeightedCloud,
    ) -> Result<Self> {
        for e in &entries {
            if e.i >= source.len() || e.j >= target.len() || !(e.mass >= 0.0) {
                return Err(Error::InvalidInput("plan entry out of range".into()));
            }
        }
        entries.sort_by_key(|e| (e.i, e.j));
        let objective = entries
            .iter()
            .map(|e| e.mass * 0.5 * dist2(&source.points[e.i], &target.points[e.j]))
            .sum();
        let mass = entries.iter().map(|e| e.mass).sum();
        Ok(Self {
            entries,
            objective,
            mass,
            reservoir_mass: 0.0,
            basis: None,
        })
    }

    pub fn row_sums(&self, n: usize) -> Vec<f64> {
        let mut r = vec![0.0; n];
        for e in &self.entries {
            r[e.i] += e.mass;
        }
        r
    }

    pub fn col_sums(&self, m: usize) -> Vec<f64> {
        let mut c = vec![0.0; m];
        for e in &self.entries {
            c[e.j] += e.mass;
        }
        c
    }
}

fn quantize_masses(weights: &[f64], scale: f64) -> Vec<i64> {
    weights.iter().map(|w| (w * scale).round() as i64).collect()
}

struct CostGrid {
    cost: Vec<f64>,
    max: f64,
}

fn real_costs(source: &WeightedCloud, target: &WeightedCloud) -> Result<CostGrid> {
    let mut cost = Vec::with_capacity(source.len() * target.len());
    let mut max = 0.0_f64;
    for x in &source.points {
        for y in &target.points {
            let c = 0.5 * dist2(x, y);
            if !(c > 0.0) {
                return Err(Error::OverlapUnsupported);
            }
            max = max.max(c);
            cost.push(c);
        }
    }
    Ok(CostGrid { cost, max })
}

fn cost_scale(max_cost: f64, nodes: usize) -> f64 {
    let ceiling = COST_CEILING
        .min(POTENTIAL_BUDGET / (nodes as f64 + 1.0))
        .floor();
    ceiling / max_cost
}

/// Minimum quadratic-cost coupling moving exactly `problem.mass`.
///
/// The source gains a reservoir that can feed any target for free and the
/// target gains one that can absorb any source for free; with strictly
/// positive real costs the optimum never routes reservoir to reservoir.
pub fn solve_partial(problem: &PartialProblem) -> Result<TransportPlan> {
    let (src, tgt) = (&problem.source, &problem.target);
    let (n, m) = (src.len(), tgt.len());
    let grid = real_costs(src, tgt)?;

    let scale = MASS_QUANTA / src.total_mass.max(tgt.total_mass);
    let qf = quantize_masses(&src.weights, scale);
    let qg = quantize_masses(&tgt.weights, scale);
    let sum_f: i64 = qf.iter().sum();
    let sum_g: i64 = qg.iter().sum();
    let qm = ((problem.mass * scale).round() as i64)
        .min(sum_f)
        .min(sum_g);

    // nodes: sources 0..n, source reservoir n, targets n+1..n+1+m, target reservoir n+1+m
    let nodes = n + m + 2;
    let t0 = n + 1;
    let mut supply = Vec::with_capacity(nodes);
    supply.extend_from_slice(&qf);
    supply.push(sum_g - qm);
    supply.extend(qg.iter().map(|q| -q));
    supply.push(-(sum_f - qm));

    let k = cost_scale(grid.max, nodes);
    let mut arcs = Vec::with_capacity((n + 1) * (m + 1));
    let mut cost = Vec::with_capacity((n + 1) * (m + 1));
    for i in 0..=n {
        for j in 0..=m {
            arcs.push((i, t0 + j));
            cost.push(if i < n && j < m {
                ((grid.cost[i * m + j] * k).round() as i64).max(1)
            } else {
                0
            });
        }
    }

    let sol = min_cost_flow(nodes, &supply, &arcs, &cost)?;

    let mut entries = Vec::new();
    let mut objective = 0.0;
    let mut moved: i64 = 0;
    for i in 0..n {
        for j in 0..m {
            let f = sol.flows[i * (m + 1) + j];
            if f > 0 {
                let mass = f as f64 / scale;
                objective += mass * grid.cost[i * m + j];
                moved += f;
                entries.push(PlanEntry { i, j, mass });
            }
        }
    }
    let reservoir_flow = sol.flows[n * (m + 1) + m];
    let pi = &sol.potentials;
    let basis = Basis {
        alpha: (0..n).map(|i| -(pi[i] as f64) / k).collect(),
        beta: (0..m).map(|j| pi[t0 + j] as f64 / k).collect(),
        alpha_reservoir: -(pi[n] as f64) / k,
        beta_reservoir: pi[t0 + m] as f64 / k,
    };
    Ok(TransportPlan {
        entries,
        objective,
        mass: moved as f64 / scale,
        reservoir_mass: reservoir_flow as f64 / scale,
        basis: Some(basis),
    })
}

/// Plain balanced transport without reservoirs; total masses must agree to 1e-9.
pub fn solve_balanced(source: &WeightedCloud, target: &WeightedCloud) -> Result<TransportPlan> {
    let (f, g) = (source.total_mass, target.total_mass);
    if (f - g).abs() > 1e-9 * f.max(g) {
        return Err(Error::UnbalancedMasses {
            source_mass: f,
            target_mass: g,
        });
    }
    let (n, m) = (source.len(), target.len());
    let grid = real_costs(source, target)?;
    let scale = MASS_QUANTA / f.max(g);
    let qf = quantize_masses(&source.weights, scale);
    let mut qg = quantize_masses(&target.weights, scale);
    // absorb rounding so the network balances
    let diff: i64 = qf.iter().sum::<i64>() - qg.iter().sum::<i64>();
    let heaviest = (0..m)
        .max_by_key(|&j| (qg[j], std::cmp::Reverse(j)))
        .expect("nonempty target");
    qg[heaviest] += diff;

    let nodes = n + m;
    let mut supply = qf.clone();
    supply.extend(qg.iter().map(|q| -q));
    let k = cost_scale(grid.max, nodes);
    let mut arcs = Vec::with_capacity(n * m);
    let mut cost = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            arcs.push((i, n + j));
            cost.push(((grid.cost[i * m + j] * k).round() as i64).max(1));
        }
    }
    let sol = min_cost_flow(nodes, &supply, &arcs, &cost)?;
    let mut entries = Vec::new();
    let mut objective = 0.0;
    let mut moved: i64 = 0;
    for i in 0..n {
        for j in 0..m {
            let fl = sol.flows[i * m + j];
            if fl > 0 {
                let mass = fl as f64 / scale;
                objective += mass * grid.cost[i * m + j];
                moved += fl;
                entries.push(PlanEntry { i, j, mass });
            }
        }
    }
    let pi = &sol.potentials;
    // Reservoirs are absent; give them the loosest admissible values.
    let alpha: Vec<f64> = (0..n).map(|i| -(pi[i] as f64) / k).collect();
    let beta: Vec<f64> = (0..m).map(|j| pi[n + j] as f64 / k).collect();
    let amax = alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bmax = beta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let basis = Basis {
        alpha_reservoir: -bmax - grid.max,
        beta_reservoir: -amax - grid.max,
        alpha,
        beta,
    };
    Ok(TransportPlan {
        entries,
        objective,
        mass: moved as f64 / scale,
        reservoir_mass: 0.0,
        basis: Some(basis),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(points: &[f64], weights: &[f64]) -> WeightedCloud {
        WeightedCloud::new(
            points.iter().map(|&p| vec![p]).collect(),
            weights.to_vec(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn single_route() {
        let d = 3.0;
        let p = PartialProblem::new(cloud(&[0.0], &[1.0]), cloud(&[d], &[1.0]), 0.4).unwrap();
        let plan = solve_partial(&p).unwrap();
        assert_eq!(plan.entries.len(), 1);
        assert!((plan.entries[0].mass - 0.4).abs() < 1e-12);
        assert!((plan.objective - 0.4 * d * d / 2.0).abs() < 1e-12);
        assert_eq!(plan.reservoir_mass, 0.0);
    }

    #[test]
    fn nearest_mass_moves_first() {
        let src = cloud(&[-2.0, -1.0, 0.0], &[1.0, 1.0, 1.0]);
        let tgt = cloud(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]);
        let plan = solve_partial(&PartialProblem::new(src, tgt, 1.0).unwrap()).unwrap();
        assert_eq!(plan.entries.len(), 1);
        assert_eq!((plan.entries[0].i, plan.entries[0].j), (2, 0));
        assert!((plan.entries[0].mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn excess_mass_is_rejected() {
        let err =
            PartialProblem::new(cloud(&[0.0], &[1.0]), cloud(&[1.0], &[0.5]), 0.8).unwrap_err();
        assert!(matches!(err, Error::MassExceedsMarginal { .. }));
    }

    #[test]
    fn coincident_points_are_overlap() {
        let p = PartialProblem::new(cloud(&[0.0, 1.0], &[1.0, 1.0]), cloud(&[1.0], &[1.0]), 0.5)
            .unwrap();
        assert_eq!(solve_partial(&p), Err(Error::OverlapUnsupported));
    }

    #[test]
    fn balanced_requires_equal_masses() {
        let r = solve_balanced(&cloud(&[0.0], &[1.0]), &cloud(&[1.0], &[2.0]));
        assert!(matches!(r, Err(Error::UnbalancedMasses { .. })));
    }
}
