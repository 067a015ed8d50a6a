use std::time::Instant;

use rayon::prelude::*;

use crate::asymptotics::{check_distances, max_normal_angle};
use crate::convex_analysis::{holder_exponent, DiscretePotential};
use crate::error::{Error, Result};
use crate::geometry::{discretize, ConvexDomain, Density, WeightedCloud};
use crate::table::{fmt_float, Table};
use crate::transport::cyclical_monotonicity_violation_seeded;
use crate::twotarget::{
    cone_separation_check, solve_two_target, splitting_height, Label, TargetPiece,
    TwoTargetProblem, TwoTargetSolution,
};
use crate::vector::{dist, dot, norm2, scale, sub, unit};

pub const TWO_TARGET_COLUMNS: [&str; 9] = [
    "d",
    "flatness_F",
    "lipschitz",
    "lipschitz_bound",
    "alpha_hat",
    "max_normal_angle",
    "cone_violations",
    "objective",
    "runtime_s",
];

/// A source between two targets stacked along the last axis; `d` is the gap
/// between them, split evenly about the hyperplane `{y^n = 0}`.
#[derive(Clone, Debug)]
pub struct TwoTargetConfig {
    pub source: ConvexDomain,
    /// Reference shapes; translated so that `sup_{V₁} y^n = -d/2` and `inf_{V₂} y^n = d/2`.
    pub lower: ConvexDomain,
    pub upper: ConvexDomain,
    pub source_density: Density,
    /// Evaluated in reference position, rescaled so total target mass equals the source's.
    pub lower_density: Density,
    pub upper_density: Density,
    pub resolution: usize,
    pub record_timings: bool,
    pub seed: u64,
}

impl TwoTargetConfig {
    fn placed(&self, d: f64) -> (ConvexDomain, Vec<f64>, ConvexDomain, Vec<f64>) {
        let n = self.source.dim();
        let e = unit(n, n - 1);
        let s1 = scale(&e, -0.5 * d - self.lower.support(&e));
        let s2 = scale(&e, 0.5 * d + self.upper.support(&scale(&e, -1.0)));
        (
            self.lower.translated(&s1),
            s1,
            self.upper.translated(&s2),
            s2,
        )
    }

    pub fn build(&self, d: f64) -> Result<TwoTargetProblem> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "distance {d} must be positive"
            )));
        }
        let (v1, s1, v2, s2) = self.placed(d);
        let f = discretize(
            &self.source,
            |x| self.source_density.eval(x),
            self.resolution,
        )?;
        let mut g1 = discretize(
            &v1,
            |y| self.lower_density.eval(&sub(y, &s1)),
            self.resolution,
        )?;
        let mut g2 = discretize(
            &v2,
            |y| self.upper_density.eval(&sub(y, &s2)),
            self.resolution,
        )?;
        let r = f.total_mass / (g1.total_mass + g2.total_mass);
        for g in [&mut g1, &mut g2] {
            rescale(g, r);
        }
        TwoTargetProblem::new(
            self.source.clone(),
            f,
            TargetPiece {
                domain: Some(v1),
                cloud: g1,
            },
            TargetPiece {
                domain: Some(v2),
                cloud: g2,
            },
        )
    }
}

fn rescale(c: &mut WeightedCloud, r: f64) {
    for w in &mut c.weights {
        *w *= r;
    }
    c.total_mass = c.weights.iter().sum();
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoTargetRow {
    pub d: f64,
    /// Largest distance of an interface vertex from the mass-splitting plane.
    pub flatness_f: f64,
    pub lipschitz: f64,
    pub lipschitz_bound: f64,
    pub alpha: f64,
    pub alpha_hat: f64,
    /// Degrees between interface normals and `-e_n`.
    pub max_normal_angle: f64,
    pub cone_violations: usize,
    pub objective: f64,
    pub runtime_s: f64,
    pub split_error: f64,
    pub relative_gap: f64,
    pub monotonicity: f64,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

impl TwoTargetRow {
    fn blank(d: f64) -> Self {
        Self {
            d,
            flatness_f: f64::NAN,
            lipschitz: f64::NAN,
            lipschitz_bound: f64::NAN,
            alpha: f64::NAN,
            alpha_hat: f64::NAN,
            max_normal_angle: f64::NAN,
            cone_violations: 0,
            objective: f64::NAN,
            runtime_s: 0.0,
            split_error: f64::NAN,
            relative_gap: f64::NAN,
            monotonicity: f64::NAN,
            notes: Vec::new(),
            error: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// The `U₁` point next to the interface closest to the axis through the source barycentre.
fn interface_base(problem: &TwoTargetProblem, sol: &TwoTargetSolution) -> Option<usize> {
    let src = &problem.source;
    let labels = &sol.partition.labels;
    let reach = 1.5 * src.spacing;
    let centre = src.barycenter();
    let off_axis = |y: &[f64]| {
        let r = sub(y, &centre);
        let t = dot(&r, &problem.axis);
        (norm2(&r) - t * t).max(0.0)
    };
    (0..src.len())
        .filter(|&i| labels[i] == Label::U1)
        .filter(|&i| {
            (0..src.len())
                .any(|k| labels[k] != Label::U1 && dist(&src.points[i], &src.points[k]) <= reach)
        })
        .min_by(|&i, &j| {
            off_axis(&src.points[i])
                .total_cmp(&off_axis(&src.points[j]))
                .then(i.cmp(&j))
        })
}

pub fn two_target_sweep_row(cfg: &TwoTargetConfig, d: f64) -> TwoTargetRow {
    two_target_sweep_row_detailed(cfg, d).0
}

/// As [`two_target_sweep_row`], also returning the solved problem when available.
pub fn two_target_sweep_row_detailed(
    cfg: &TwoTargetConfig,
    d: f64,
) -> (TwoTargetRow, Option<(TwoTargetProblem, TwoTargetSolution)>) {
    let start = Instant::now();
    let mut row = TwoTargetRow::blank(d);
    let mut art = None;
    if let Err(e) = fill_row(cfg, d, &mut row, &mut art) {
        row.error = Some(e.to_string());
    }
    if cfg.record_timings {
        row.runtime_s = start.elapsed().as_secs_f64();
    }
    (row, art)
}

fn fill_row(
    cfg: &TwoTargetConfig,
    d: f64,
    row: &mut TwoTargetRow,
    art: &mut Option<(TwoTargetProblem, TwoTargetSolution)>,
) -> Result<()> {
    let problem = cfg.build(d)?;
    let sol = solve_two_target(&problem)?;
    *art = Some((problem.clone(), sol.clone()));
    let src = &problem.source;
    row.alpha = problem.alpha;
    row.objective = sol.plan.objective;
    row.relative_gap = sol.duals.gap.abs() / sol.plan.objective.abs().max(f64::MIN_POSITIVE);
    row.monotonicity = cyclical_monotonicity_violation_seeded(
        &sol.plan,
        &sol.problem.source,
        &sol.problem.target,
        cfg.seed,
    );
    let split = sol.partition.split();
    row.split_error = (split[0] - problem.lower.cloud.total_mass)
        .abs()
        .max((split[1] - problem.upper.cloud.total_mass).abs());

    let c = splitting_height(&problem);
    let fb = &sol.partition.interface;
    if let Some(note) = &fb.note {
        row.notes.push(note.clone());
    }
    row.flatness_f = fb
        .vertices()
        .map(|v| (dot(&v.point, &problem.axis) - c).abs())
        .reduce(f64::max)
        .unwrap_or(f64::NAN);
    row.max_normal_angle = max_normal_angle(fb, &scale(&problem.axis, -1.0)).unwrap_or(f64::NAN);

    let cone = cone_separation_check(&sol.partition, &problem);
    row.cone_violations = cone.violations;
    row.lipschitz = cone.empirical_lipschitz;
    row.lipschitz_bound = cone.tolerance_bound;

    // u₁ near the interface, measured from inside U₁
    let u1 = sol.partition.indices(Label::U1);
    let base = interface_base(&problem, &sol)
        .ok_or_else(|| Error::InsufficientPoints("interface has no U1 neighbours".into()))?;
    let u = DiscretePotential::source_potential(&sol.problem, &sol.plan, &sol.duals, None)?;
    let inside = DiscretePotential::new(
        src.subset(&u1)?,
        u1.iter().map(|&i| u.values[i]).collect(),
        u1.iter().map(|&i| u.slopes[i].clone()).collect(),
    )?;
    let local = u1.binary_search(&base).expect("base lies in U1");
    let diam = problem
        .source_domain
        .extents()
        .into_iter()
        .fold(0.0, f64::max);
    let r0 = (0.25 * diam).max(3.0 * src.spacing);
    let radii: Vec<f64> = (0..8)
        .map(|k| r0 * 0.5_f64.powf(k as f64 / 2.0))
        .take_while(|&r| r >= 2.0 * src.spacing * (1.0 - 1e-12))
        .collect();
    if radii.len() >= 3 {
        row.alpha_hat = holder_exponent(&inside, local, &radii)?.beta;
    } else {
        row.notes.push("grid too coarse for an exponent fit".into());
    }
    Ok(())
}

pub fn two_target_sweep(cfg: &TwoTargetConfig, distances: &[f64]) -> Result<Vec<TwoTargetRow>> {
    check_distances(distances)?;
    Ok(distances
        .par_iter()
        .map(|&d| two_target_sweep_row(cfg, d))
        .collect())
}

/// As [`two_target_sweep`], keeping each row's solved problem.
#[allow(clippy::type_complexity)]
pub fn two_target_sweep_detailed(
    cfg: &TwoTargetConfig,
    distances: &[f64],
) -> Result<Vec<(TwoTargetRow, Option<(TwoTargetProblem, TwoTargetSolution)>)>> {
    check_distances(distances)?;
    Ok(distances
        .par_iter()
        .map(|&d| two_target_sweep_row_detailed(cfg, d))
        .collect())
}

pub fn two_target_table(rows: &[TwoTargetRow]) -> Table {
    let mut t = Table::new(&TWO_TARGET_COLUMNS);
    for r in rows {
        let mut cells = vec![fmt_float(r.d)];
        if r.failed() {
            cells.extend(std::iter::repeat_n(
                "failed".to_string(),
                TWO_TARGET_COLUMNS.len() - 1,
            ));
        } else {
            cells.extend([
                fmt_float(r.flatness_f),
                fmt_float(r.lipschitz),
                fmt_float(r.lipschitz_bound),
                fmt_float(r.alpha_hat),
                fmt_float(r.max_normal_angle),
                r.cone_violations.to_string(),
                fmt_float(r.objective),
                fmt_float(r.runtime_s),
            ]);
        }
        t.push(cells);
    }
    t
}
