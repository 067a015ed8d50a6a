//! Acceptance run: one PASS/FAIL line per criterion; exits nonzero on any failure.

mod support;

use std::fs;
use std::time::Instant;

use freebound::asymptotics::{sweep, sweep_table, within_trend, FarApartConfig, SweepRow};
use freebound::cli::{parse_config, run, RunOptions};
use freebound::convex_analysis::{
    centred_section, doubling_ratio, holder_exponent, legendre, ma_measure, nearest_sample,
    quadratic,
};
use freebound::freeboundary::{
    active_region, extract_free_boundary, fb_normal, interior_ball_check, Side,
};
use freebound::geometry::{discretize, ConvexDomain, Density, WeightedCloud};
use freebound::transport::{
    cyclical_monotonicity_violation, recover_duals, solve_partial, PartialProblem,
};
use freebound::twotarget::{two_target_sweep, TwoTargetConfig, TwoTargetRow};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

/// Worst relative duality gap and monotonicity violation seen so far.
#[derive(Default)]
struct Duality {
    instances: usize,
    gap: f64,
    monotonicity: f64,
}

impl Duality {
    fn add(&mut self, gap: f64, mono: f64) {
        self.instances += 1;
        // NaN poisons the maxima on purpose
        self.gap = if gap.is_nan() {
            f64::NAN
        } else {
            self.gap.max(gap)
        };
        self.monotonicity = if mono.is_nan() {
            f64::NAN
        } else {
            self.monotonicity.max(mono)
        };
    }
}

struct Harness {
    failures: usize,
}

impl Harness {
    fn report(&mut self, id: usize, pass: bool, secs: f64, detail: String) {
        if !pass {
            self.failures += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {id}: {verdict} [{secs:.2}s] {detail}");
    }
}

fn relative_gap(gap: f64, objective: f64) -> f64 {
    gap.abs() / objective.abs().max(f64::MIN_POSITIVE)
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, lo: [f64; 2], hi: [f64; 2]) -> WeightedCloud {
    let points = (0..n)
        .map(|_| {
            vec![
                rng.random_range(lo[0]..hi[0]),
                rng.random_range(lo[1]..hi[1]),
            ]
        })
        .collect();
    let weights = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    WeightedCloud::new(points, weights, 0.1).unwrap()
}

fn criterion_1(h: &mut Harness, duality: &mut Duality) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst_obj, mut worst_mass) = (0.0_f64, 0.0_f64);
    for _ in 0..50 {
        let n = rng.random_range(2..=12);
        let k = rng.random_range(2..=12);
        let f = random_cloud(&mut rng, n, [0.0, 0.0], [1.0, 1.0]);
        let g = random_cloud(&mut rng, k, [0.5, -0.5], [2.5, 1.5]);
        let m = rng.random_range(0.05..1.0) * f.total_mass.min(g.total_mass);
        let oracle = support::lp_partial(&f, &g, m);
        let p = PartialProblem::new(f, g, m).unwrap();
        let plan = solve_partial(&p).unwrap();
        worst_obj = worst_obj
            .max((plan.objective - oracle.objective).abs() / oracle.objective.abs().max(1.0));
        worst_mass = worst_mass
            .max((plan.mass - m).abs())
            .max((oracle.mass - m).abs());
        let d = recover_duals(&p, &plan).unwrap();
        duality.add(
            relative_gap(d.gap, plan.objective),
            cyclical_monotonicity_violation(&plan, &p.source, &p.target),
        );
    }
    let secs = start.elapsed().as_secs_f64();
    h.report(
        1,
        worst_obj <= 1e-9 && worst_mass <= 1e-12 && secs < 10.0,
        secs,
        format!("LP oracle on 50 instances: objective diff {worst_obj:.2e} (<= 1e-9), mass diff {worst_mass:.2e} (<= 1e-12), < 10 s"),
    );
}

fn criterion_2(h: &mut Harness, duality: &mut Duality) {
    let start = Instant::now();
    let omega = ConvexDomain::interval(-1.0, 0.0).unwrap();
    let target = ConvexDomain::interval(2.0, 3.0).unwrap();
    let f = discretize(&omega, |_| 1.0, 64).unwrap();
    let g = discretize(&target, |_| 1.0, 64).unwrap();
    let s = f.spacing;
    let oracle = support::monotone_1d(&f, &g, 0.5);
    let p = PartialProblem::new(f, g, 0.5).unwrap();
    let plan = solve_partial(&p).unwrap();
    let duals = recover_duals(&p, &plan).unwrap();
    duality.add(
        relative_gap(duals.gap, plan.objective),
        cyclical_monotonicity_violation(&plan, &p.source, &p.target),
    );
    let region = active_region(&p, &plan, &duals, Side::Source);
    let fb = extract_free_boundary(&p, &region, &duals, &omega).unwrap();
    let pts: Vec<f64> = fb.vertices().map(|v| v.point[0]).collect();
    let ib = interior_ball_check(&p, &plan, &region);
    let secs = start.elapsed().as_secs_f64();
    let located = pts.len() == 1 && (pts[0] + 0.5).abs() <= s;
    let pass = (plan.objective - 1.5625).abs() <= 0.02 * 1.5625
        && (plan.objective - oracle).abs() <= 1e-9
        && located
        && ib.violations == 0
        && secs < 5.0;
    h.report(
        2,
        pass,
        secs,
        format!(
            "facing halves: objective {:.6} (1.5625 ± 2%, monotone oracle {oracle:.6}), free boundary {pts:?} (-0.5 ± {s:.4}), {} interior-ball violations, < 5 s",
            plan.objective, ib.violations
        ),
    );
}

fn pairs() -> Vec<(&'static str, ConvexDomain, ConvexDomain)> {
    vec![
        (
            "squares",
            ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap(),
            ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap(),
        ),
        (
            "disks",
            ConvexDomain::ball(&[0.0, 0.0], 0.5).unwrap(),
            ConvexDomain::ball(&[0.3, 0.0], 0.5).unwrap(),
        ),
        (
            "ellipses",
            ConvexDomain::ellipse_axes(&[0.0, 0.0], [0.6, 0.3], 0.3).unwrap(),
            ConvexDomain::ellipse_axes(&[0.0, 0.0], [0.5, 0.35], -0.5).unwrap(),
        ),
    ]
}

fn far_apart(source: ConvexDomain, target: ConvexDomain, res: usize) -> FarApartConfig {
    FarApartConfig {
        source,
        target,
        source_density: Density::Uniform(1.0),
        target_density: Density::Uniform(1.0),
        mass_fraction: 0.5,
        resolution: res,
        record_timings: false,
        seed: SEED,
    }
}

fn criterion_4(h: &mut Harness, duality: &mut Duality) {
    let start = Instant::now();
    let mut total = 0;
    let mut per = Vec::new();
    for (name, src, tgt) in pairs() {
        let cfg = far_apart(src, tgt, 32);
        for d in [2.0, 4.0, 8.0] {
            let inst = cfg.build(d).unwrap();
            let ib = interior_ball_check(&inst.problem, &inst.plan, &inst.source_region);
            duality.add(
                relative_gap(inst.duals.gap, inst.plan.objective),
                cyclical_monotonicity_violation(
                    &inst.plan,
                    &inst.problem.source,
                    &inst.problem.target,
                ),
            );
            total += ib.violations;
            per.push(format!("{name}@{d}:{}", ib.violations));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    h.report(
        4,
        total == 0 && secs < 180.0,
        secs,
        format!(
            "interior ball, 2-spacing guard: {total} violations [{}], < 3 min",
            per.join(" ")
        ),
    );
}

fn criterion_5(h: &mut Harness) {
    let start = Instant::now();
    // Legendre transform at interior points of [-1, 1]²
    let big = ConvexDomain::cuboid(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
    let q = quadratic(discretize(&big, |_| 1.0, 32).unwrap());
    let s = q.cloud.spacing;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let query: Vec<Vec<f64>> = (0..400)
        .map(|_| vec![rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9)])
        .collect();
    let lg = legendre(&q, &query);
    let legendre_err = query
        .iter()
        .zip(&lg)
        .map(|(x, v)| (v - 0.5 * (x[0] * x[0] + x[1] * x[1])).abs())
        .fold(0.0, f64::max);
    let legendre_ok = legendre_err <= s * s;

    let unit = ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let qu = quadratic(discretize(&unit, |_| 1.0, 32).unwrap());
    let all: Vec<usize> = (0..qu.len()).collect();
    let ma = ma_measure(&qu, &all).unwrap();
    let ma_ok = (ma - 1.0).abs() <= 0.03;

    let base = nearest_sample(&q, &[0.0, 0.0]);
    let sec = centred_section(&q, base, 0.1).unwrap();
    let dr = doubling_ratio(&q, &sec).unwrap();
    let dr_ok = (dr - 0.25).abs() <= 0.1 * 0.25;

    let radii = [0.8, 0.56, 0.4, 0.28, 0.2, 0.14];
    let beta = holder_exponent(&q, base, &radii).unwrap().beta;
    let beta_ok = (beta - 1.0).abs() <= 0.1;

    let secs = start.elapsed().as_secs_f64();
    h.report(
        5,
        legendre_ok && ma_ok && dr_ok && beta_ok,
        secs,
        format!(
            "quadratic: legendre err {legendre_err:.2e} (<= spacing² {:.2e}), MA(unit square) {ma:.4} (1 ± 3%), doubling {dr:.4} (0.25 ± 10%), holder {beta:.4} (1 ± 0.1)",
            s * s
        ),
    );
}

fn trend(rows: &[SweepRow], f: impl Fn(&SweepRow) -> f64) -> bool {
    rows.windows(2)
        .all(|w| within_trend(f(&w[0]), f(&w[1]), w[0].spacing.max(w[1].spacing)))
}

fn criterion_6(h: &mut Harness, duality: &mut Duality) -> Vec<SweepRow> {
    let start = Instant::now();
    let unit = ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let rows = sweep(&far_apart(unit.clone(), unit, 32), &[4.0, 8.0, 16.0]).unwrap();
    for r in &rows {
        duality.add(r.relative_gap, r.monotonicity);
    }
    let secs = start.elapsed().as_secs_f64();
    let ok_rows = rows.iter().all(|r| !r.failed());
    let omega = trend(&rows, |r| r.omega);
    let du = trend(&rows, |r| r.delta_u);
    let dv = trend(&rows, |r| r.delta_v);
    let qd = trend(&rows, |r| r.quadratic_dev);
    let alpha = rows
        .windows(2)
        .all(|w| w[1].alpha_hat >= w[0].alpha_hat - 0.1);
    let oblique = rows.iter().all(|r| r.oblique_min > -r.spacing);
    let col = |f: &dyn Fn(&SweepRow) -> f64| {
        rows.iter()
            .map(|r| format!("{:.3e}", f(r)))
            .collect::<Vec<_>>()
            .join("/")
    };
    h.report(
        6,
        ok_rows && omega && du && dv && qd && alpha && oblique && secs < 600.0,
        secs,
        format!(
            "squares d=4/8/16: omega {} ({omega}), delta_U {} ({du}), delta_V {} ({dv}), quad dev {} ({qd}), alpha_hat {} ({alpha}), oblique_min {} ({oblique}), < 10 min{}",
            col(&|r| r.omega),
            col(&|r| r.delta_u),
            col(&|r| r.delta_v),
            col(&|r| r.quadratic_dev),
            col(&|r| r.alpha_hat),
            col(&|r| r.oblique_min),
            if ok_rows { String::new() } else { format!(", failed rows: {:?}", rows.iter().filter_map(|r| r.error.clone()).collect::<Vec<_>>()) }
        ),
    );
    rows
}

fn two_target_config(
    lower: ConvexDomain,
    upper: ConvexDomain,
    upper_density: Density,
    res: usize,
) -> TwoTargetConfig {
    TwoTargetConfig {
        source: ConvexDomain::cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap(),
        lower,
        upper,
        source_density: Density::Uniform(1.0),
        lower_density: Density::Uniform(1.0),
        upper_density,
        resolution: res,
        record_timings: false,
        seed: SEED,
    }
}

fn criterion_7(h: &mut Harness, duality: &mut Duality) {
    let start = Instant::now();
    let sq = ConvexDomain::cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap();
    let sym = two_target_sweep(
        &two_target_config(sq.clone(), sq.clone(), Density::Uniform(1.0), 24),
        &[2.0, 4.0],
    )
    .unwrap();
    let s = 1.0 / 24.0;
    let flat = sym.iter().all(|r| !r.failed() && r.flatness_f <= 2.0 * s);

    let asym_cases = [
        (
            ConvexDomain::cuboid(&[0.3, 0.0], &[1.3, 1.0]).unwrap(),
            ConvexDomain::ball(&[-0.4, 0.0], 0.5).unwrap(),
            Density::Linear {
                a: 1.0,
                b: 0.5,
                axis: 0,
            },
            1.0,
        ),
        (
            ConvexDomain::ellipse_axes(&[0.5, 0.0], [0.8, 0.3], 0.4).unwrap(),
            sq.clone(),
            Density::Uniform(1.0),
            2.0,
        ),
        (
            ConvexDomain::ball(&[0.0, 0.0], 0.5).unwrap(),
            ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 0.6]).unwrap(),
            Density::Linear {
                a: 1.0,
                b: 0.5,
                axis: 0,
            },
            2.0,
        ),
    ];
    let mut asym: Vec<TwoTargetRow> = Vec::new();
    for (lower, upper, dens, d) in asym_cases {
        asym.extend(two_target_sweep(&two_target_config(lower, upper, dens, 24), &[d]).unwrap());
    }
    for r in sym.iter().chain(&asym) {
        duality.add(r.relative_gap, r.monotonicity);
    }
    let cones: usize = sym.iter().chain(&asym).map(|r| r.cone_violations).sum();
    let all_ok = sym.iter().chain(&asym).all(|r| !r.failed());
    let lip = asym.iter().all(|r| r.lipschitz <= r.lipschitz_bound);
    let secs = start.elapsed().as_secs_f64();
    h.report(
        7,
        all_ok && flat && cones == 0 && lip && secs < 180.0,
        secs,
        format!(
            "two targets: mirror flatness {} (<= 2·spacing {:.4}), cone violations {cones}, lipschitz {} vs bound {}, < 3 min",
            sym.iter().map(|r| format!("{:.4}", r.flatness_f)).collect::<Vec<_>>().join("/"),
            2.0 * s,
            asym.iter().map(|r| format!("{:.3}", r.lipschitz)).collect::<Vec<_>>().join("/"),
            asym.iter().map(|r| format!("{:.3}", r.lipschitz_bound)).collect::<Vec<_>>().join("/"),
        ),
    );
}

fn criterion_8(h: &mut Harness, rows: &[SweepRow]) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut exact = true;
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n1 = fb_normal(&[0.0, 0.0], &v).unwrap();
        // powers of two scale the displacement without rounding
        let k = rng.random_range(-20..20);
        let scaled: Vec<f64> = v.iter().map(|c| c * 2f64.powi(k)).collect();
        exact &= fb_normal(&[0.0, 0.0], &scaled).unwrap() == n1;
        let lam = rng.random_range(1e-3..1e3);
        let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + lam * b).collect();
        let n2 = fb_normal(&x, &y).unwrap();
        worst = worst.max(
            n1.iter()
                .zip(&n2)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
    }
    let (a4, a16) = (rows[0].max_normal_angle, rows[2].max_normal_angle);
    let secs = start.elapsed().as_secs_f64();
    h.report(
        8,
        exact && worst <= 1e-12 && a16 <= a4,
        secs,
        format!("fb_normal: exact under 2^k scaling ({exact}), max deviation {worst:.1e} under general scaling; max angle d=16 {a16:.4}° <= d=4 {a4:.4}°"),
    );
}

const PARTIAL_2D: &str = "kind = partial
resolution = 20
mass_fraction = 0.4
seed = 5

[source]
shape = ball
center = 0, 0
radius = 1
density = radial
density_a = 1
density_b = 0.5

[target]
shape = ellipse
center = 0.5, 4
axes = 1.2, 0.6
angle = 0.3
";

const SWEEP_2D: &str = "kind = sweep
resolution = 24
mass_fraction = 0.5
distances = 2, 4
seed = 5

[source]
shape = ball
center = 0, 0
radius = 0.5

[target]
shape = box
lo = 0, 0
hi = 1, 0.8
";

fn criterion_9(h: &mut Harness) {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let mut same = true;
    let mut files = 0;
    let mut codes = Vec::new();
    for (name, text) in [("partial", PARTIAL_2D), ("sweep", SWEEP_2D)] {
        let cfg = parse_config(text).unwrap();
        let mut outs = Vec::new();
        let mut exits = Vec::new();
        for rep in 0..2 {
            let out = tmp.path().join(format!("{name}{rep}"));
            let opts = RunOptions {
                out: out.clone(),
                jobs: Some(1 + rep),
                verbose: false,
            };
            exits.push(run(&cfg, &opts).unwrap().exit_code());
            outs.push(out);
        }
        same &= exits[0] == exits[1];
        codes.push(exits[0]);
        let mut names: Vec<_> = fs::read_dir(&outs[0])
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for n in names {
            files += 1;
            same &= fs::read(outs[0].join(&n)).unwrap() == fs::read(outs[1].join(&n)).unwrap();
        }
    }
    let unit = ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let cfg = far_apart(unit.clone(), unit, 16);
    let a = sweep_table(&sweep(&cfg, &[4.0, 8.0]).unwrap()).to_csv();
    let b = sweep_table(&sweep(&cfg, &[4.0, 8.0]).unwrap()).to_csv();
    same &= a == b;
    let secs = start.elapsed().as_secs_f64();
    h.report(9, same, secs, format!("repeated runs byte-identical across {files} CLI outputs (exit codes {codes:?}) and a sweep table"));
}

fn main() {
    let total = Instant::now();
    let mut h = Harness { failures: 0 };
    let mut duality = Duality::default();
    criterion_1(&mut h, &mut duality);
    criterion_2(&mut h, &mut duality);
    criterion_4(&mut h, &mut duality);
    criterion_5(&mut h);
    let rows = criterion_6(&mut h, &mut duality);
    criterion_7(&mut h, &mut duality);
    h.report(
        3,
        duality.gap <= 1e-6 && duality.monotonicity <= 1e-9,
        0.0,
        format!(
            "duality over {} solved instances: worst relative gap {:.2e} (<= 1e-6), worst monotonicity {:.2e} (<= 1e-9)",
            duality.instances, duality.gap, duality.monotonicity
        ),
    );
    criterion_8(&mut h, &rows);
    criterion_9(&mut h);
    println!(
        "acceptance: {} failed, total {:.1}s",
        h.failures,
        total.elapsed().as_secs_f64()
    );
    if h.failures > 0 {
        std::process::exit(1);
    }
}
