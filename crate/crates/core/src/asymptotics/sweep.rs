use std::time::Instant;

use rayon::prelude::*;

use crate::asymptotics::{
    closeness, flatness, obliqueness_check, quadratic_deviation, slide_to_limit, LimitProblem,
};
use crate::convex_analysis::{holder_exponent, DiscretePotential};
use crate::error::{Error, Result};
use crate::freeboundary::{
    active_region, extract_free_boundary, interior_ball_check_seeded, ActiveRegion, FreeBoundary,
    Side,
};
use crate::geometry::{discretize, ConvexDomain, Density, WeightedCloud};
use crate::table::{fmt_float, Table};
use crate::transport::{
    cyclical_monotonicity_violation_seeded, recover_duals, solve_partial, DualPair, PartialProblem,
    TransportPlan,
};
use crate::vector::{dist, dot, norm2, scale, sub, unit};

pub const SWEEP_COLUMNS: [&str; 9] = [
    "d",
    "delta_U",
    "delta_V",
    "omega",
    "alpha_hat",
    "oblique_min",
    "ib_violations",
    "objective",
    "runtime_s",
];

/// Probe points keep this many grid steps away from the edge of `V ∩ V∞`.
const COLLAR: f64 = 3.0;

/// A source/target pair separated along the last coordinate axis. The target
/// is given in reference position and translated so that the gap between
/// `sup_Ω x^n` and `inf_Ω* y^n` equals the requested distance.
#[derive(Clone, Debug)]
pub struct FarApartConfig {
    pub source: ConvexDomain,
    pub target: ConvexDomain,
    pub source_density: Density,
    /// Evaluated in the target's reference position.
    pub target_density: Density,
    /// Transported mass as a fraction of the smaller total mass.
    pub mass_fraction: f64,
    pub resolution: usize,
    pub record_timings: bool,
    /// Seed for the sampled checks on large supports.
    pub seed: u64,
}

/// One solved far-apart configuration.
#[derive(Clone, Debug)]
pub struct Instance {
    pub d: f64,
    pub axis: Vec<f64>,
    pub source_domain: ConvexDomain,
    pub target_domain: ConvexDomain,
    pub problem: PartialProblem,
    pub plan: TransportPlan,
    pub duals: DualPair,
    pub source_region: ActiveRegion,
    pub target_region: ActiveRegion,
}

impl FarApartConfig {
    pub fn axis(&self) -> Vec<f64> {
        unit(self.source.dim(), self.source.dim() - 1)
    }

    /// Translation putting the target at separation `d` along the axis.
    pub fn target_shift(&self, d: f64) -> Vec<f64> {
        let e = self.axis();
        let top = self.source.support(&e);
        let bottom = -self.target.support(&scale(&e, -1.0));
        scale(&e, top + d - bottom)
    }

    pub fn build(&self, d: f64) -> Result<Instance> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "distance {d} must be positive"
            )));
        }
        if !(self.mass_fraction > 0.0 && self.mass_fraction <= 1.0) {
            return Err(Error::InvalidInput(
                "mass_fraction must lie in (0, 1]".into(),
            ));
        }
        let shift = self.target_shift(d);
        let target_domain = self.target.translated(&shift);
        let f = discretize(
            &self.source,
            |x| self.source_density.eval(x),
            self.resolution,
        )?;
        let g = discretize(
            &target_domain,
            |y| self.target_density.eval(&sub(y, &shift)),
            self.resolution,
        )?;
        let m = self.mass_fraction * f.total_mass.min(g.total_mass);
        let problem = PartialProblem::new(f, g, m)?;
        let plan = solve_partial(&problem)?;
        let duals = recover_duals(&problem, &plan)?;
        let source_region = active_region(&problem, &plan, &duals, Side::Source);
        let target_region = active_region(&problem, &plan, &duals, Side::Target);
        Ok(Instance {
            d,
            axis: self.axis(),
            source_domain: self.source.clone(),
            target_domain,
            problem,
            plan,
            duals,
            source_region,
            target_region,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub d: f64,
    pub delta_u: f64,
    pub delta_v: f64,
    pub omega: f64,
    pub alpha_hat: f64,
    pub oblique_min: f64,
    pub ib_violations: usize,
    pub objective: f64,
    pub runtime_s: f64,
    /// Not part of the CSV; kept for trend checks and the manifest.
    pub quadratic_dev: f64,
    /// Largest angle (degrees) between a free-boundary normal and the axis.
    pub max_normal_angle: f64,
    pub oblique_height_min: f64,
    pub a: f64,
    pub b: f64,
    pub spacing: f64,
    pub relative_gap: f64,
    pub monotonicity: f64,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

impl SweepRow {
    fn blank(d: f64) -> Self {
        Self {
            d,
            delta_u: f64::NAN,
            delta_v: f64::NAN,
            omega: f64::NAN,
            alpha_hat: f64::NAN,
            oblique_min: f64::NAN,
            ib_violations: 0,
            objective: f64::NAN,
            runtime_s: 0.0,
            quadratic_dev: f64::NAN,
            max_normal_angle: f64::NAN,
            oblique_height_min: f64::NAN,
            a: f64::NAN,
            b: f64::NAN,
            spacing: f64::NAN,
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

/// Largest angle (degrees) between boundary normals and `axis`.
pub fn max_normal_angle(fb: &FreeBoundary, axis: &[f64]) -> Option<f64> {
    fb.vertices()
        .map(|v| dot(&v.normal, axis).clamp(-1.0, 1.0).acos().to_degrees())
        .reduce(f64::max)
}

/// Active target points next to an inactive one, nearest the line through
/// the target barycentre along `axis`.
fn boundary_base(cloud: &WeightedCloud, region: &ActiveRegion, axis: &[f64]) -> Option<usize> {
    let reach = 1.5 * cloud.spacing;
    let centre = cloud.barycenter();
    let off_axis = |y: &[f64]| {
        let r = sub(y, &centre);
        let t = dot(&r, axis);
        (norm2(&r) - t * t).max(0.0)
    };
    region
        .indices
        .iter()
        .copied()
        .filter(|&j| {
            (0..cloud.len())
                .any(|k| !region.active[k] && dist(&cloud.points[j], &cloud.points[k]) <= reach)
        })
        .min_by(|&i, &j| {
            off_axis(&cloud.points[i])
                .total_cmp(&off_axis(&cloud.points[j]))
                .then(i.cmp(&j))
        })
}

/// Points of `V ∩ V∞` at least the collar away from the rest of the target and
/// from `∂Ω*`, plus the probe point nearest the probe barycentre as anchor.
fn probe_set(inst: &Instance, limit: &LimitProblem) -> (Vec<usize>, Option<usize>) {
    let tgt = &inst.problem.target;
    let s = tgt.spacing;
    let mut inside = vec![false; tgt.len()];
    for (k, &j) in limit.target_index.iter().enumerate() {
        // only cells wholly below the cut
        let full = limit.problem.target.weights[k] >= tgt.weights[j] * (1.0 - 1e-9);
        inside[j] = full && inst.target_region.active[j];
    }
    let outside: Vec<usize> = (0..tgt.len()).filter(|&j| !inside[j]).collect();
    let probe: Vec<usize> = (0..tgt.len())
        .filter(|&j| inside[j])
        .filter(|&j| inst.target_domain.boundary_distance(&tgt.points[j]) >= COLLAR * s)
        .filter(|&j| {
            (dot(&tgt.points[j], &limit.axis) - limit.b).abs() >= COLLAR * s
                && outside
                    .iter()
                    .all(|&k| dist(&tgt.points[j], &tgt.points[k]) >= COLLAR * s)
        })
        .collect();
    if probe.is_empty() {
        return (probe, None);
    }
    let mut c = vec![0.0; tgt.dim];
    for &j in &probe {
        for (a, y) in c.iter_mut().zip(&tgt.points[j]) {
            *a += y / probe.len() as f64;
        }
    }
    let anchor = probe.iter().copied().min_by(|&i, &j| {
        dist(&tgt.points[i], &c)
            .total_cmp(&dist(&tgt.points[j], &c))
            .then(i.cmp(&j))
    });
    (probe, anchor)
}

fn restrict(p: &DiscretePotential, indices: &[usize]) -> Result<DiscretePotential> {
    DiscretePotential::new(
        p.cloud.subset(indices)?,
        indices.iter().map(|&i| p.values[i]).collect(),
        indices.iter().map(|&i| p.slopes[i].clone()).collect(),
    )
}

/// Geometric radii from `r0` down to two grid steps (at least three of them).
fn holder_radii(r0: f64, spacing: f64) -> Vec<f64> {
    let mut radii: Vec<f64> = (0..8)
        .map(|k| r0 * 0.5_f64.powf(k as f64 / 2.0))
        .take_while(|&r| r >= 2.0 * spacing * (1.0 - 1e-12))
        .collect();
    while radii.len() < 3 {
        let last = *radii.last().unwrap_or(&r0);
        radii.push(last * 0.8);
    }
    radii
}

/// Solved instance and free boundary behind a sweep row.
#[derive(Clone, Debug)]
pub struct RowArtifacts {
    pub instance: Instance,
    pub free_boundary: Option<FreeBoundary>,
}

/// Every measurement for one distance; stops at the first failing stage.
pub fn sweep_row(cfg: &FarApartConfig, d: f64) -> SweepRow {
    sweep_row_detailed(cfg, d).0
}

/// As [`sweep_row`], also returning whatever was solved before any failure.
pub fn sweep_row_detailed(cfg: &FarApartConfig, d: f64) -> (SweepRow, Option<RowArtifacts>) {
    let start = Instant::now();
    let mut row = SweepRow::blank(d);
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
    cfg: &FarApartConfig,
    d: f64,
    row: &mut SweepRow,
    art: &mut Option<RowArtifacts>,
) -> Result<()> {
    let inst = cfg.build(d)?;
    let (src, tgt) = (&inst.problem.source, &inst.problem.target);
    row.spacing = src.spacing;
    row.objective = inst.plan.objective;
    row.relative_gap = inst.duals.gap.abs() / inst.plan.objective.abs().max(f64::MIN_POSITIVE);
    row.monotonicity = cyclical_monotonicity_violation_seeded(&inst.plan, src, tgt, cfg.seed);
    row.notes.extend(inst.source_region.warning.iter().cloned());
    row.notes.extend(inst.target_region.warning.iter().cloned());

    let ib = interior_ball_check_seeded(&inst.problem, &inst.plan, &inst.source_region, cfg.seed);
    row.ib_violations = ib.violations;

    let fb = if inst.source_domain.dim() <= 2 {
        let fb = extract_free_boundary(
            &inst.problem,
            &inst.source_region,
            &inst.duals,
            &inst.source_domain,
        )?;
        if let Some(note) = &fb.note {
            row.notes.push(note.clone());
        }
        row.max_normal_angle = max_normal_angle(&fb, &inst.axis).unwrap_or(f64::NAN);
        Some(fb)
    } else {
        None
    };
    *art = Some(RowArtifacts {
        instance: inst.clone(),
        free_boundary: fb,
    });

    let limit = slide_to_limit(
        &inst.problem,
        &inst.source_domain,
        &inst.target_domain,
        &inst.axis,
    )?;
    row.a = limit.a;
    row.b = limit.b;
    row.delta_u = flatness(&inst.source_region, src, &inst.axis, limit.a);
    row.delta_v = flatness(&inst.target_region, tgt, &scale(&inst.axis, -1.0), -limit.b);

    let ob = obliqueness_check(&limit, &inst.source_domain);
    row.oblique_min = ob.oblique_min.unwrap_or(f64::NAN);
    row.oblique_height_min = ob.height_min.unwrap_or(f64::NAN);
    if let Some(note) = ob.note {
        row.notes.push(note);
    }

    let (probe, anchor) = probe_set(&inst, &limit);
    let v_limit: Vec<f64> = limit
        .target_values(tgt.len())
        .into_iter()
        .map(|v| v.unwrap_or(f64::NAN))
        .collect();
    row.omega = closeness(&inst.duals.phi, &v_limit, &probe, anchor.unwrap_or(0))?;

    let v = DiscretePotential::target_potential(
        &inst.problem,
        &inst.plan,
        &inst.duals,
        Some(&inst.source_domain),
    )?;
    let base = boundary_base(tgt, &inst.target_region, &inst.axis)
        .ok_or_else(|| Error::InsufficientPoints("target free boundary has no samples".into()))?;
    let diam = inst.target_domain.extents().into_iter().fold(0.0, f64::max);
    let r0 = (0.25 * diam).max(3.0 * tgt.spacing);
    // regularity is measured from inside V, where v is not pinned to the obstacle
    let inside = restrict(&v, &inst.target_region.indices)?;
    let local = inst
        .target_region
        .indices
        .binary_search(&base)
        .expect("base point is active");
    let fit = holder_exponent(&inside, local, &holder_radii(r0, tgt.spacing))?;
    row.alpha_hat = fit.beta;
    row.quadratic_dev = quadratic_deviation(&v, &inst.target_region.indices, base, r0)?;
    Ok(())
}

/// Rows for strictly increasing distances, computed in parallel and emitted in order.
pub fn sweep(cfg: &FarApartConfig, distances: &[f64]) -> Result<Vec<SweepRow>> {
    check_distances(distances)?;
    Ok(distances.par_iter().map(|&d| sweep_row(cfg, d)).collect())
}

/// As [`sweep`], keeping each row's artifacts.
pub fn sweep_detailed(
    cfg: &FarApartConfig,
    distances: &[f64],
) -> Result<Vec<(SweepRow, Option<RowArtifacts>)>> {
    check_distances(distances)?;
    Ok(distances
        .par_iter()
        .map(|&d| sweep_row_detailed(cfg, d))
        .collect())
}

pub(crate) fn check_distances(distances: &[f64]) -> Result<()> {
    if distances.is_empty() {
        return Err(Error::InvalidInput(
            "at least one distance is required".into(),
        ));
    }
    if distances.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidInput(
            "distances must be positive and finite".into(),
        ));
    }
    if distances.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "distances must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// CSV with the fixed sweep columns; failed rows carry `failed` in every
/// measurement column.
pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&SWEEP_COLUMNS);
    for r in rows {
        let mut cells = vec![fmt_float(r.d)];
        if r.failed() {
            cells.extend(std::iter::repeat_n(
                "failed".to_string(),
                SWEEP_COLUMNS.len() - 1,
            ));
        } else {
            cells.extend([
                fmt_float(r.delta_u),
                fmt_float(r.delta_v),
                fmt_float(r.omega),
                fmt_float(r.alpha_hat),
                fmt_float(r.oblique_min),
                r.ib_violations.to_string(),
                fmt_float(r.objective),
                fmt_float(r.runtime_s),
            ]);
        }
        t.push(cells);
    }
    t
}

/// `later <= earlier + band` with `band = 2 · spacing · max(1, |earlier|, |later|)`.
pub fn within_trend(earlier: f64, later: f64, spacing: f64) -> bool {
    let osc = 1.0_f64.max(earlier.abs()).max(later.abs());
    later <= earlier + 2.0 * spacing * osc
}
