use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde_json::{json, Value};

use crate::asymptotics::{sweep_detailed, sweep_table, FarApartConfig, SweepRow};
use crate::cli::config::{ExperimentConfig, Kind};
use crate::cli::output::{CheckRecord, RunManifest, StageRecord, Writer};
use crate::cli::svg::render_svg;
use crate::convex_analysis::{
    centred_section, doubling_ratio, holder_exponent, nearest_sample, section_equivalence,
    DiscretePotential,
};
use crate::error::Result;
use crate::freeboundary::{
    active_region, extract_free_boundary, interior_ball_check_seeded, FreeBoundary, Side,
    BOUNDARY_TRIM, SATURATION,
};
use crate::geometry::{discretize, ConvexDomain, WeightedCloud};
use crate::table::{fmt_float, Table};
use crate::transport::{
    cyclical_monotonicity_violation_seeded, max_feasibility_violation, recover_duals,
    solve_partial, DualPair, PartialProblem, TransportPlan,
};
use crate::twotarget::{
    cone_separation_check, partition_table, solve_two_target, two_target_sweep_detailed,
    two_target_table, Label, TargetPiece, TwoTargetConfig, TwoTargetProblem, TwoTargetRow,
    TwoTargetSolution,
};
use crate::vector::dist;

const GAP_LIMIT: f64 = 1e-6;
const MONOTONICITY_LIMIT: f64 = 1e-9;
const MASS_LIMIT: f64 = 1e-9;
const FEASIBILITY_LIMIT: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub jobs: Option<usize>,
    pub verbose: bool,
}

/// Failures that stop a run before the pipeline starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunError {
    Usage(String),
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) | RunError::Io(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for RunError {}

impl RunManifest {
    pub fn exit_code(&self) -> i32 {
        if self.solver_failed {
            3
        } else if !self.invariants_passed {
            2
        } else {
            0
        }
    }
}

struct Session {
    writer: Writer,
    timings: bool,
    verbose: bool,
    seed: u64,
    stages: Vec<StageRecord>,
    checks: Vec<CheckRecord>,
    results: BTreeMap<String, Value>,
    notes: Vec<String>,
    solver_failed: bool,
    io_error: Option<String>,
}

impl Session {
    fn log(&self, msg: &str) {
        if self.verbose {
            eprintln!("freebound: {msg}");
        }
    }

    /// Runs one stage, recording its runtime and any error under its name.
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Option<T> {
        self.log(&format!("stage {name}"));
        let start = Instant::now();
        let out = f();
        let runtime = if self.timings {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        self.record(name, runtime, out.as_ref().err().map(|e| e.to_string()));
        out.ok()
    }

    fn record(&mut self, name: &str, runtime_s: f64, error: Option<String>) {
        if let Some(e) = &error {
            self.log(&format!("stage {name} failed: {e}"));
            self.solver_failed = true;
        }
        self.stages.push(StageRecord {
            stage: name.to_string(),
            runtime_s,
            status: if error.is_some() { "error" } else { "ok" }.into(),
            error,
        });
    }

    /// `value <= limit`; NaN fails.
    fn check(&mut self, name: &str, value: f64, limit: f64, hard: bool) {
        let passed = value <= limit;
        if !passed {
            self.log(&format!("check {name} failed: {value} > {limit}"));
        }
        self.checks.push(CheckRecord {
            name: name.to_string(),
            value,
            limit,
            passed,
            hard,
        });
    }

    fn result(&mut self, key: &str, value: Value) {
        self.results.insert(key.to_string(), value);
    }

    fn write(&mut self, name: &str, contents: &str) {
        if self.io_error.is_some() {
            return;
        }
        self.log(&format!("write {name}"));
        if let Err(e) = self.writer.write(name, contents.as_bytes()) {
            self.io_error = Some(format!("{name}: {e}"));
        }
    }

    fn svg(
        &mut self,
        name: &str,
        domains: &[ConvexDomain],
        active: &[Vec<f64>],
        fb: Option<&FreeBoundary>,
    ) {
        match render_svg(domains, active, fb) {
            Ok(s) => self.write(name, &s),
            Err(e) => {
                let note = format!("{name}: {e}");
                if !self.notes.contains(&note) {
                    self.notes.push(note);
                }
            }
        }
    }
}

fn tolerances() -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("relative_gap".into(), GAP_LIMIT),
        ("monotonicity".into(), MONOTONICITY_LIMIT),
        ("relative_mass".into(), MASS_LIMIT),
        ("dual_feasibility".into(), FEASIBILITY_LIMIT),
        ("interior_ball_guard_spacings".into(), 2.0),
        ("boundary_trim_spacings".into(), BOUNDARY_TRIM),
        ("saturation".into(), SATURATION),
    ])
}

/// Executes the configured pipeline and writes its outputs to `opts.out`;
/// the manifest comes last. Invariant and solver failures are reported
/// through the manifest, not as errors.
pub fn run(
    config: &ExperimentConfig,
    opts: &RunOptions,
) -> std::result::Result<RunManifest, RunError> {
    let writer = Writer::open(&opts.out).map_err(RunError::Usage)?;
    let mut s = Session {
        writer,
        timings: config.record_timings,
        verbose: opts.verbose,
        seed: config.seed,
        stages: Vec::new(),
        checks: Vec::new(),
        results: BTreeMap::new(),
        notes: Vec::new(),
        solver_failed: false,
        io_error: None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Io(format!("thread pool: {e}")))?;
    pool.install(|| match config.kind {
        Kind::Partial => partial(config, &mut s),
        Kind::Sweep => far_apart_sweep(config, &mut s),
        Kind::TwoTarget => two_target(config, &mut s),
        Kind::TwoTargetSweep => two_target_sweep(config, &mut s),
        Kind::Sections => sections(config, &mut s),
    });
    if let Some(e) = s.io_error {
        return Err(RunError::Io(e));
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.echo.clone(),
        stages: s.stages,
        tolerances: tolerances(),
        invariants_passed: s.checks.iter().all(|c| c.passed || !c.hard),
        checks: s.checks,
        results: s.results,
        notes: s.notes,
        solver_failed: s.solver_failed,
        files: Vec::new(),
    };
    s.writer
        .finish(manifest)
        .map_err(|e| RunError::Io(format!("manifest: {e}")))
}

fn num(x: f64) -> Value {
    // NaN and infinities become null
    json!(x)
}

struct Solved {
    source_domain: ConvexDomain,
    target_domain: ConvexDomain,
    problem: PartialProblem,
    plan: TransportPlan,
    duals: DualPair,
}

fn solve_configured(config: &ExperimentConfig, s: &mut Session) -> Option<Solved> {
    let (src, tgt) = (config.domain("source"), config.domain("target"));
    let res = config.resolution;
    let f = s.stage("discretize_source", || {
        discretize(&src.domain, |x| src.density.eval(x), res)
    })?;
    let g = s.stage("discretize_target", || {
        discretize(&tgt.domain, |y| tgt.density.eval(y), res)
    })?;
    let frac = config
        .mass_fraction
        .expect("partial kinds carry a mass fraction");
    let m = frac * f.total_mass.min(g.total_mass);
    let problem = s.stage("problem", || PartialProblem::new(f, g, m))?;
    let plan = s.stage("solve", || solve_partial(&problem))?;
    let duals = s.stage("duals", || recover_duals(&problem, &plan))?;
    transport_checks(s, "", &problem, &plan, &duals);
    Some(Solved {
        source_domain: src.domain.clone(),
        target_domain: tgt.domain.clone(),
        problem,
        plan,
        duals,
    })
}

fn transport_checks(
    s: &mut Session,
    tag: &str,
    problem: &PartialProblem,
    plan: &TransportPlan,
    duals: &DualPair,
) {
    let gap = duals.gap.abs() / plan.objective.abs().max(f64::MIN_POSITIVE);
    let mono =
        cyclical_monotonicity_violation_seeded(plan, &problem.source, &problem.target, s.seed);
    let mass = (plan.mass - problem.mass).abs() / problem.mass;
    let feas = max_feasibility_violation(problem, duals);
    s.check(&format!("{tag}relative_gap"), gap, GAP_LIMIT, true);
    s.check(
        &format!("{tag}monotonicity"),
        mono,
        MONOTONICITY_LIMIT,
        true,
    );
    s.check(&format!("{tag}relative_mass"), mass, MASS_LIMIT, true);
    s.check(
        &format!("{tag}dual_feasibility"),
        feas,
        FEASIBILITY_LIMIT,
        false,
    );
}

fn plan_table(problem: &PartialProblem, plan: &TransportPlan) -> Table {
    let n = problem.source.dim;
    let mut header = vec!["i".to_string(), "j".to_string()];
    header.extend((1..=n).map(|k| format!("x{k}")));
    header.extend((1..=n).map(|k| format!("y{k}")));
    header.extend(["mass", "cost"].map(String::from));
    let mut t = Table::new(&header);
    for e in &plan.entries {
        let (x, y) = (&problem.source.points[e.i], &problem.target.points[e.j]);
        let mut row = vec![e.i.to_string(), e.j.to_string()];
        row.extend(x.iter().chain(y).map(|&v| fmt_float(v)));
        row.extend([fmt_float(e.mass), fmt_float(0.5 * dist(x, y).powi(2))]);
        t.push(row);
    }
    t
}

fn duals_table(problem: &PartialProblem, plan: &TransportPlan, duals: &DualPair) -> Table {
    let n = problem.source.dim;
    let mut header = vec!["side".to_string(), "index".to_string()];
    header.extend((1..=n).map(|k| format!("z{k}")));
    header.extend(["weight", "carried", "potential", "obstacle"].map(String::from));
    let mut t = Table::new(&header);
    let sides = [
        (
            "source",
            &problem.source,
            plan.row_sums(problem.source.len()),
            &duals.psi,
        ),
        (
            "target",
            &problem.target,
            plan.col_sums(problem.target.len()),
            &duals.phi,
        ),
    ];
    for (side, cloud, carried, pot) in sides {
        for (i, z) in cloud.points.iter().enumerate() {
            let mut row = vec![side.to_string(), i.to_string()];
            row.extend(z.iter().map(|&v| fmt_float(v)));
            row.extend([
                fmt_float(cloud.weights[i]),
                fmt_float(carried[i]),
                fmt_float(pot[i]),
                fmt_float(duals.obstacle(z)),
            ]);
            t.push(row);
        }
    }
    t
}

fn boundary_table(dim: usize, fb: &FreeBoundary) -> Table {
    let mut header = vec!["component".to_string(), "vertex".to_string()];
    header.extend((1..=dim).map(|k| format!("x{k}")));
    header.extend((1..=dim).map(|k| format!("normal{k}")));
    let mut t = Table::new(&header);
    for (c, comp) in fb.components.iter().enumerate() {
        for (k, v) in comp.iter().enumerate() {
            let mut row = vec![c.to_string(), k.to_string()];
            row.extend(v.point.iter().chain(&v.normal).map(|&x| fmt_float(x)));
            t.push(row);
        }
    }
    t
}

fn points(cloud: &WeightedCloud, idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| cloud.points[i].clone()).collect()
}

fn distance_name(prefix: &str, d: f64) -> String {
    format!("{prefix}_d{d}.svg")
}

fn partial(config: &ExperimentConfig, s: &mut Session) {
    let Some(sol) = solve_configured(config, s) else {
        return;
    };
    let Solved {
        source_domain,
        target_domain,
        problem,
        plan,
        duals,
    } = &sol;
    let src_region = active_region(problem, plan, duals, Side::Source);
    let tgt_region = active_region(problem, plan, duals, Side::Target);
    s.notes.extend(src_region.warning.iter().cloned());
    s.notes.extend(tgt_region.warning.iter().cloned());
    let ib = interior_ball_check_seeded(problem, plan, &src_region, s.seed);
    s.check("interior_ball_violations", ib.violations as f64, 0.0, true);

    s.result("objective", num(plan.objective));
    s.result("mass", num(plan.mass));
    s.result("lambda", num(duals.lambda));
    s.result("dual_value", num(duals.dual_value));
    s.result("active_source_points", json!(src_region.indices.len()));
    s.result("active_target_points", json!(tgt_region.indices.len()));
    s.result("active_set_agreement", num(src_region.agreement));
    s.result("interior_ball_pairs", json!(ib.pairs_checked));
    s.write("plan.csv", &plan_table(problem, plan).to_csv());
    s.write("duals.csv", &duals_table(problem, plan, duals).to_csv());

    let dim = problem.source.dim;
    let fb = if dim <= 2 {
        s.stage("free_boundary", || {
            extract_free_boundary(problem, &src_region, duals, source_domain)
        })
    } else {
        s.notes.push(format!(
            "free boundary extraction unsupported in dimension {dim}"
        ));
        None
    };
    if let Some(fb) = &fb {
        s.notes.extend(fb.note.iter().cloned());
        s.result("free_boundary_vertices", json!(fb.len()));
        s.write("free_boundary.csv", &boundary_table(dim, fb).to_csv());
    }
    let mut active = points(&problem.source, &src_region.indices);
    active.extend(points(&problem.target, &tgt_region.indices));
    s.svg(
        "figure.svg",
        &[source_domain.clone(), target_domain.clone()],
        &active,
        fb.as_ref(),
    );
}

fn sweep_row_json(r: &SweepRow) -> Value {
    json!({
        "d": num(r.d),
        "a": num(r.a),
        "b": num(r.b),
        "spacing": num(r.spacing),
        "quadratic_dev": num(r.quadratic_dev),
        "max_normal_angle": num(r.max_normal_angle),
        "oblique_height_min": num(r.oblique_height_min),
        "relative_gap": num(r.relative_gap),
        "monotonicity": num(r.monotonicity),
        "notes": r.notes,
        "error": r.error,
    })
}

fn far_apart_sweep(config: &ExperimentConfig, s: &mut Session) {
    let (src, tgt) = (config.domain("source"), config.domain("target"));
    let cfg = FarApartConfig {
        source: src.domain.clone(),
        target: tgt.domain.clone(),
        source_density: src.density.clone(),
        target_density: tgt.density.clone(),
        mass_fraction: config.mass_fraction.expect("sweeps carry a mass fraction"),
        resolution: config.resolution,
        record_timings: config.record_timings,
        seed: config.seed,
    };
    let Some(rows) = s.stage("sweep", || sweep_detailed(&cfg, &config.distances)) else {
        return;
    };
    for (row, _) in &rows {
        let tag = format!("d={}", row.d);
        s.record(&format!("row {tag}"), row.runtime_s, row.error.clone());
        if !row.failed() {
            s.check(
                &format!("{tag} relative_gap"),
                row.relative_gap,
                GAP_LIMIT,
                true,
            );
            s.check(
                &format!("{tag} monotonicity"),
                row.monotonicity,
                MONOTONICITY_LIMIT,
                true,
            );
            s.check(
                &format!("{tag} interior_ball_violations"),
                row.ib_violations as f64,
                0.0,
                true,
            );
        }
    }
    let plain: Vec<SweepRow> = rows.iter().map(|(r, _)| r.clone()).collect();
    s.result(
        "rows",
        Value::Array(plain.iter().map(sweep_row_json).collect()),
    );
    s.write("sweep.csv", &sweep_table(&plain).to_csv());
    for (row, art) in &rows {
        let Some(art) = art else { continue };
        let inst = &art.instance;
        let mut active = points(&inst.problem.source, &inst.source_region.indices);
        active.extend(points(&inst.problem.target, &inst.target_region.indices));
        s.svg(
            &distance_name("figure", row.d),
            &[inst.source_domain.clone(), inst.target_domain.clone()],
            &active,
            art.free_boundary.as_ref(),
        );
    }
}

/// The active-target restriction of the target potential.
fn active_target_potential(sol: &Solved, active: &[usize]) -> Result<DiscretePotential> {
    let v = DiscretePotential::target_potential(
        &sol.problem,
        &sol.plan,
        &sol.duals,
        Some(&sol.source_domain),
    )?;
    Ok(DiscretePotential::new(
        v.cloud.subset(active)?,
        active.iter().map(|&i| v.values[i]).collect(),
        active.iter().map(|&i| v.slopes[i].clone()).collect(),
    )?
    .with_gradient_domain(sol.source_domain.clone()))
}

fn sections(config: &ExperimentConfig, s: &mut Session) {
    let Some(sol) = solve_configured(config, s) else {
        return;
    };
    let tgt_region = active_region(&sol.problem, &sol.plan, &sol.duals, Side::Target);
    s.notes.extend(tgt_region.warning.iter().cloned());
    s.result("objective", num(sol.plan.objective));
    let Some(v) = s.stage("target_potential", || {
        active_target_potential(&sol, &tgt_region.indices)
    }) else {
        return;
    };
    let centre = match &config.base {
        Some(b) => b.clone(),
        None => v.cloud.barycenter(),
    };
    let base = nearest_sample(&v, &centre);
    s.result("base_point", json!(v.cloud.points[base]));

    let header = [
        "height",
        "members",
        "center_offset",
        "diameter",
        "iterations",
        "doubling_ratio",
        "equivalence",
    ];
    let mut t = Table::new(&header);
    let mut member_header = vec!["height".to_string(), "index".to_string()];
    member_header.extend((1..=v.cloud.dim).map(|k| format!("y{k}")));
    member_header.push("in_section".into());
    let mut members = Table::new(&member_header);
    for &h in &config.heights {
        let row = s.stage(&format!("section h={h}"), || {
            let sec = centred_section(&v, base, h)?;
            let dr = doubling_ratio(&v, &sec)?;
            let eq = section_equivalence(&v, base, &[h])?;
            Ok((sec, dr, eq))
        });
        let mut cells = vec![fmt_float(h)];
        match row {
            Some((sec, dr, eq)) => {
                for (k, y) in v.cloud.points.iter().enumerate() {
                    let mut row = vec![fmt_float(h), tgt_region.indices[k].to_string()];
                    row.extend(y.iter().map(|&c| fmt_float(c)));
                    row.push(u8::from(sec.members.binary_search(&k).is_ok()).to_string());
                    members.push(row);
                }
                cells.extend([
                    sec.members.len().to_string(),
                    fmt_float(sec.center_offset),
                    fmt_float(sec.diameter),
                    sec.iterations.to_string(),
                    fmt_float(dr),
                    fmt_float(eq),
                ]);
            }
            None => cells.extend(std::iter::repeat_n("failed".to_string(), header.len() - 1)),
        }
        t.push(cells);
    }
    s.write("sections.csv", &t.to_csv());
    s.write("section_members.csv", &members.to_csv());

    let spacing = v.cloud.spacing;
    let diam = sol.target_domain.extents().into_iter().fold(0.0, f64::max);
    let r0 = (0.25 * diam).max(3.0 * spacing);
    let radii: Vec<f64> = (0..8)
        .map(|k| r0 * 0.5_f64.powf(k as f64 / 2.0))
        .take_while(|&r| r >= 2.0 * spacing * (1.0 - 1e-12))
        .collect();
    if let Some(fit) = s.stage("holder", || holder_exponent(&v, base, &radii)) {
        s.result("holder_beta", num(fit.beta));
        s.result("holder_residual", num(fit.residual));
    }
}

fn rescaled(mut c: WeightedCloud, r: f64) -> WeightedCloud {
    for w in &mut c.weights {
        *w *= r;
    }
    c.total_mass = c.weights.iter().sum();
    c
}

fn two_target_problem(config: &ExperimentConfig) -> Result<TwoTargetProblem> {
    let res = config.resolution;
    let [src, lo, hi] = ["source", "lower", "upper"].map(|k| config.domain(k));
    let f = discretize(&src.domain, |x| src.density.eval(x), res)?;
    let g1 = discretize(&lo.domain, |y| lo.density.eval(y), res)?;
    let g2 = discretize(&hi.domain, |y| hi.density.eval(y), res)?;
    let r = f.total_mass / (g1.total_mass + g2.total_mass);
    TwoTargetProblem::new(
        src.domain.clone(),
        f,
        TargetPiece {
            domain: Some(lo.domain.clone()),
            cloud: rescaled(g1, r),
        },
        TargetPiece {
            domain: Some(hi.domain.clone()),
            cloud: rescaled(g2, r),
        },
    )
}

fn two_target_checks(
    s: &mut Session,
    tag: &str,
    problem: &TwoTargetProblem,
    sol: &TwoTargetSolution,
) {
    transport_checks(s, tag, &sol.problem, &sol.plan, &sol.duals);
    let split = sol.partition.split();
    let err = (split[0] - problem.lower.cloud.total_mass)
        .abs()
        .max((split[1] - problem.upper.cloud.total_mass).abs());
    s.check(
        &format!("{tag}split_error"),
        err / problem.source.total_mass,
        MASS_LIMIT,
        true,
    );
    let cone = cone_separation_check(&sol.partition, problem);
    s.check(
        &format!("{tag}cone_violations"),
        cone.violations as f64,
        0.0,
        true,
    );
    if problem.source.dim > 1 {
        s.check(
            &format!("{tag}lipschitz"),
            cone.empirical_lipschitz,
            cone.tolerance_bound,
            false,
        );
    }
}

fn two_target(config: &ExperimentConfig, s: &mut Session) {
    let Some(problem) = s.stage("problem", || two_target_problem(config)) else {
        return;
    };
    let Some(sol) = s.stage("solve", || solve_two_target(&problem)) else {
        return;
    };
    two_target_checks(s, "", &problem, &sol);
    let cone = cone_separation_check(&sol.partition, &problem);
    s.result("objective", num(sol.plan.objective));
    s.result("alpha", num(problem.alpha));
    s.result("lipschitz", num(cone.empirical_lipschitz));
    s.result("lipschitz_bound", num(cone.bound));
    s.result("interface_vertices", json!(sol.partition.interface.len()));
    s.notes.extend(sol.partition.interface.note.iter().cloned());

    let dim = problem.source.dim;
    s.write(
        "partition.csv",
        &partition_table(&problem.source, &sol.partition).to_csv(),
    );
    s.write(
        "interface.csv",
        &boundary_table(dim, &sol.partition.interface).to_csv(),
    );
    s.write("plan.csv", &plan_table(&sol.problem, &sol.plan).to_csv());
    let u1 = points(&problem.source, &sol.partition.indices(Label::U1));
    let domains = two_target_domains(&problem);
    s.svg("figure.svg", &domains, &u1, Some(&sol.partition.interface));
}

fn two_target_domains(problem: &TwoTargetProblem) -> Vec<ConvexDomain> {
    let mut d = vec![problem.source_domain.clone()];
    d.extend(problem.lower.domain.iter().cloned());
    d.extend(problem.upper.domain.iter().cloned());
    d
}

fn two_target_row_json(r: &TwoTargetRow) -> Value {
    json!({
        "d": num(r.d),
        "alpha": num(r.alpha),
        "split_error": num(r.split_error),
        "relative_gap": num(r.relative_gap),
        "monotonicity": num(r.monotonicity),
        "notes": r.notes,
        "error": r.error,
    })
}

fn two_target_sweep(config: &ExperimentConfig, s: &mut Session) {
    let [src, lo, hi] = ["source", "lower", "upper"].map(|k| config.domain(k));
    let cfg = TwoTargetConfig {
        source: src.domain.clone(),
        lower: lo.domain.clone(),
        upper: hi.domain.clone(),
        source_density: src.density.clone(),
        lower_density: lo.density.clone(),
        upper_density: hi.density.clone(),
        resolution: config.resolution,
        record_timings: config.record_timings,
        seed: config.seed,
    };
    let Some(rows) = s.stage("sweep", || {
        two_target_sweep_detailed(&cfg, &config.distances)
    }) else {
        return;
    };
    for (row, art) in &rows {
        let tag = format!("d={} ", row.d);
        s.record(
            &format!("row {}", tag.trim_end()),
            row.runtime_s,
            row.error.clone(),
        );
        if let (false, Some((problem, sol))) = (row.failed(), art) {
            two_target_checks(s, &tag, problem, sol);
        }
    }
    let plain: Vec<TwoTargetRow> = rows.iter().map(|(r, _)| r.clone()).collect();
    s.result(
        "rows",
        Value::Array(plain.iter().map(two_target_row_json).collect()),
    );
    s.write("two_target_sweep.csv", &two_target_table(&plain).to_csv());
    for (row, art) in &rows {
        let Some((problem, sol)) = art else { continue };
        let u1 = points(&problem.source, &sol.partition.indices(Label::U1));
        s.svg(
            &distance_name("figure", row.d),
            &two_target_domains(problem),
            &u1,
            Some(&sol.partition.interface),
        );
    }
}
