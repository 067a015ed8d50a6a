//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use freebound::geometry::WeightedCloud;
use minilp::{ComparisonOp, OptimizationDirection, Problem};

pub struct LpPlan {
    pub objective: f64,
    pub mass: f64,
    /// Row-major `n × m` transport masses.
    pub flow: Vec<f64>,
}

fn cost(x: &[f64], y: &[f64]) -> f64 {
    0.5 * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

/// Dense LP: minimise `Σ c_ij π_ij` over `π ≥ 0` with row sums `≤ f`,
/// column sums `≤ g` and total mass `m`.
pub fn lp_partial(source: &WeightedCloud, target: &WeightedCloud, m: f64) -> LpPlan {
    let (n, k) = (source.len(), target.len());
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..n * k)
        .map(|v| {
            lp.add_var(
                cost(&source.points[v / k], &target.points[v % k]),
                (0.0, f64::INFINITY),
            )
        })
        .collect();
    for i in 0..n {
        lp.add_constraint(
            (0..k).map(|j| (vars[i * k + j], 1.0)),
            ComparisonOp::Le,
            source.weights[i],
        );
    }
    for j in 0..k {
        lp.add_constraint(
            (0..n).map(|i| (vars[i * k + j], 1.0)),
            ComparisonOp::Le,
            target.weights[j],
        );
    }
    lp.add_constraint(vars.iter().map(|&v| (v, 1.0)), ComparisonOp::Eq, m);
    let sol = lp.solve().expect("feasible LP");
    let flow: Vec<f64> = vars.iter().map(|&v| sol[v]).collect();
    LpPlan {
        objective: sol.objective(),
        mass: flow.iter().sum(),
        flow,
    }
}

/// Optimal partial cost on the line when the whole source lies left of the
/// target: the rightmost source mass `m` goes monotonically onto the
/// leftmost target mass `m`.
pub fn monotone_1d(source: &WeightedCloud, target: &WeightedCloud, m: f64) -> f64 {
    let mut s: Vec<(f64, f64)> = source
        .points
        .iter()
        .map(|p| p[0])
        .zip(source.weights.iter().copied())
        .collect();
    let mut t: Vec<(f64, f64)> = target
        .points
        .iter()
        .map(|p| p[0])
        .zip(target.weights.iter().copied())
        .collect();
    s.sort_by(|a, b| b.0.total_cmp(&a.0));
    t.sort_by(|a, b| a.0.total_cmp(&b.0));
    // take mass m from each side, then couple the two pieces in increasing order
    let take = |v: &[(f64, f64)]| {
        let mut left = m;
        let mut out = Vec::new();
        for &(x, w) in v {
            if left <= 0.0 {
                break;
            }
            let q = w.min(left);
            out.push((x, q));
            left -= q;
        }
        out
    };
    let mut a = take(&s);
    a.reverse();
    let b = take(&t);
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a[0].1, b[0].1);
    let mut total = 0.0;
    loop {
        let q = ra.min(rb);
        total += q * 0.5 * (a[i].0 - b[j].0).powi(2);
        ra -= q;
        rb -= q;
        if ra <= 1e-15 {
            i += 1;
            if i == a.len() {
                break;
            }
            ra = a[i].1;
        }
        if rb <= 1e-15 {
            j += 1;
            if j == b.len() {
                break;
            }
            rb = b[j].1;
        }
    }
    total
}
