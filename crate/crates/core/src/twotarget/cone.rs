use std::collections::BTreeMap;

use crate::twotarget::{Label, Partition, TwoTargetProblem};
use crate::vector::{dist, dot, sub};

#[derive(Clone, Debug, PartialEq)]
pub struct ConeReport {
    /// `U₂` points deep inside the downward cone of some `U₁` point.
    pub violations: usize,
    pub pairs_checked: usize,
    /// Slope bound `√(1-α²)/α` implied by the aperture.
    pub bound: f64,
    /// Column-wise Lipschitz constant of the reconstructed graph `sup_x f_x`.
    pub cone_graph_lipschitz: f64,
    /// Lipschitz constant of the top of `U₁` per grid column, over column
    /// pairs at least `feature_size` apart.
    pub empirical_lipschitz: f64,
    pub feature_size: f64,
    /// `bound + 4·spacing/feature_size`.
    pub tolerance_bound: f64,
}

impl ConeReport {
    pub fn lipschitz_ok(&self) -> bool {
        self.empirical_lipschitz <= self.tolerance_bound
    }
}

/// Column key (grid index without the last axis) and column coordinates.
fn columns(problem: &TwoTargetProblem) -> BTreeMap<Vec<i64>, (Vec<f64>, Vec<usize>)> {
    let src = &problem.source;
    let n = src.dim;
    let mut cols: BTreeMap<Vec<i64>, (Vec<f64>, Vec<usize>)> = BTreeMap::new();
    for (i, x) in src.points.iter().enumerate() {
        let key: Vec<i64> = match &src.grid {
            Some(g) => g.cells[i][..n - 1].iter().map(|&k| k as i64).collect(),
            None => x[..n - 1]
                .iter()
                .map(|v| (v / src.spacing).round() as i64)
                .collect(),
        };
        let entry = cols
            .entry(key)
            .or_insert_with(|| (x[..n - 1].to_vec(), Vec::new()));
        entry.1.push(i);
    }
    for (c, members) in cols.values_mut() {
        // centre each column on its members so partial cells do not skew it
        let k = members.len() as f64;
        for (a, slot) in c.iter_mut().enumerate() {
            *slot = members.iter().map(|&i| src.points[i][a]).sum::<f64>() / k;
        }
    }
    cols
}

fn max_slope(values: &[(Vec<f64>, f64)], min_sep: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, (ca, fa)) in values.iter().enumerate() {
        for (cb, fb) in &values[a + 1..] {
            let d = dist(ca, cb);
            if d >= min_sep && d > 0.0 {
                worst = worst.max((fa - fb).abs() / d);
            }
        }
    }
    worst
}

/// Every source point deep inside the downward cone
/// `{e : e·(-axis) ≥ √(1-α²)}` of a `U₁` point must not be in `U₂`; points
/// within two grid steps of the cone boundary are excused. Also reports the
/// Lipschitz constants of the separating graph.
pub fn cone_separation_check(partition: &Partition, problem: &TwoTargetProblem) -> ConeReport {
    let src = &problem.source;
    let s = src.spacing;
    let guard = 2.0 * s;
    let alpha = problem.alpha.min(1.0);
    let c = (1.0 - alpha * alpha).max(0.0).sqrt();
    let bound = c / alpha;
    let u1 = partition.indices(Label::U1);
    let u2 = partition.indices(Label::U2);
    let mut violations = 0;
    for &i in &u1 {
        let x = &src.points[i];
        for &k in &u2 {
            let d = sub(x, &src.points[k]);
            let depth = dot(&d, &problem.axis) - c * dist(x, &src.points[k]);
            if depth >= guard {
                violations += 1;
            }
        }
    }

    let n = src.dim;
    let cols = columns(problem);
    let extent = {
        let (lo, hi) = problem.source_domain.bounding_box();
        (0..n - 1).map(|a| hi[a] - lo[a]).fold(0.0, f64::max)
    };
    let feature_size = if n == 1 {
        1.0
    } else {
        (0.25 * extent).max(4.0 * s)
    };
    let mut tops = Vec::new();
    let mut cone_graph = Vec::new();
    if n > 1 {
        for (cx, members) in cols.values() {
            let top = members
                .iter()
                .filter(|&&i| partition.labels[i] != Label::U2)
                .map(|&i| dot(&src.points[i], &problem.axis))
                .reduce(f64::max);
            if let Some(t) = top {
                tops.push((cx.clone(), t));
            }
            let f = u1
                .iter()
                .map(|&i| {
                    let x = &src.points[i];
                    dot(x, &problem.axis) - bound * dist(&x[..n - 1], cx)
                })
                .reduce(f64::max);
            if let Some(f) = f {
                cone_graph.push((cx.clone(), f));
            }
        }
    }
    ConeReport {
        violations,
        pairs_checked: u1.len() * u2.len(),
        bound,
        cone_graph_lipschitz: max_slope(&cone_graph, 0.0),
        empirical_lipschitz: max_slope(&tops, feature_size),
        feature_size,
        tolerance_bound: bound + 4.0 * s / feature_size,
    }
}
