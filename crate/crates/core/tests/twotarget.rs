use freebound::geometry::{discretize, ConvexDomain, Density, WeightedCloud};
use freebound::twotarget::{
    cone_separation_check, interface_normal, partition_table, solve_two_target, splitting_height,
    two_target_sweep, two_target_table, Label, TargetPiece, TwoTargetConfig, TwoTargetProblem,
    TWO_TARGET_COLUMNS,
};
use freebound::Error;
use proptest::prelude::*;

fn symmetric(res: usize) -> TwoTargetConfig {
    let sq = ConvexDomain::cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap();
    TwoTargetConfig {
        source: sq.clone(),
        lower: sq.clone(),
        upper: sq,
        source_density: Density::Uniform(1.0),
        lower_density: Density::Uniform(1.0),
        upper_density: Density::Uniform(1.0),
        resolution: res,
        record_timings: false,
        seed: 7,
    }
}

fn point_piece(y: f64, mass: f64, spacing: f64) -> TargetPiece {
    TargetPiece {
        domain: None,
        cloud: WeightedCloud::new(vec![vec![y]], vec![mass], spacing).unwrap(),
    }
}

#[test]
fn one_dimensional_split_at_one() {
    let u = ConvexDomain::interval(0.0, 2.0).unwrap();
    let f = discretize(&u, |_| 1.0, 16).unwrap();
    let h = f.spacing;
    let p =
        TwoTargetProblem::new(u, f, point_piece(-1.0, 1.0, h), point_piece(3.0, 1.0, h)).unwrap();
    let sol = solve_two_target(&p).unwrap();
    for (x, l) in p.source.points.iter().zip(&sol.partition.labels) {
        match l {
            Label::U1 => assert!(x[0] < 1.0 + h),
            Label::U2 => assert!(x[0] > 1.0 - h),
            Label::Interface => assert!((x[0] - 1.0).abs() <= h),
        }
    }
    let fb = &sol.partition.interface;
    assert_eq!(fb.len(), 1);
    let v = fb.vertices().next().unwrap();
    assert!((v.point[0] - 1.0).abs() <= h);
    assert!((v.normal[0] + 1.0).abs() < 1e-12);
    assert_eq!(cone_separation_check(&sol.partition, &p).violations, 0);
    let split = sol.partition.split();
    assert!((split[0] - 1.0).abs() <= 1e-9 && (split[1] - 1.0).abs() <= 1e-9);
}

#[test]
fn unbalanced_and_unseparated_inputs_fail() {
    let u = ConvexDomain::interval(0.0, 2.0).unwrap();
    let f = discretize(&u, |_| 1.0, 16).unwrap();
    let h = f.spacing;
    let e = TwoTargetProblem::new(
        u.clone(),
        f.clone(),
        point_piece(-1.0, 1.0, h),
        point_piece(3.0, 0.5, h),
    )
    .unwrap_err();
    assert!(matches!(e, Error::UnbalancedMasses { .. }));
    let e = TwoTargetProblem::new(u, f, point_piece(3.0, 1.0, h), point_piece(-1.0, 1.0, h))
        .unwrap_err();
    assert_eq!(e, Error::NotSeparated);
}

#[test]
fn single_loaded_target_takes_everything() {
    let u = ConvexDomain::interval(0.0, 2.0).unwrap();
    let f = discretize(&u, |_| 1.0, 16).unwrap();
    let h = f.spacing;
    let mut empty = point_piece(3.0, 1.0, h);
    empty.cloud.weights = vec![0.0];
    empty.cloud.total_mass = 0.0;
    let p = TwoTargetProblem::new(u, f, point_piece(-1.0, 2.0, h), empty).unwrap();
    let sol = solve_two_target(&p).unwrap();
    assert!(sol.partition.labels.iter().all(|&l| l == Label::U1));
    assert!(sol.partition.interface.is_empty());
}

#[test]
fn symmetric_configuration_is_flat_and_mirrored() {
    let cfg = symmetric(16);
    let p = cfg.build(2.0).unwrap();
    let sol = solve_two_target(&p).unwrap();
    let h = p.source.spacing;
    let c = splitting_height(&p);
    assert!(c.abs() < 1e-9);
    let fb = &sol.partition.interface;
    assert!(!fb.is_empty());
    for v in fb.vertices() {
        assert!((v.point[1] - c).abs() <= 2.0 * h, "{:?}", v.point);
        let angle = (-v.normal[1]).clamp(-1.0, 1.0).acos().to_degrees();
        assert!(angle <= 15.0);
    }
    // reflection x² ↦ -x² swaps the labels
    let labels = &sol.partition.labels;
    for (i, x) in p.source.points.iter().enumerate() {
        let k = p
            .source
            .points
            .iter()
            .position(|z| (z[0] - x[0]).abs() < 1e-12 && (z[1] + x[1]).abs() < 1e-12)
            .unwrap();
        let swapped = match labels[k] {
            Label::U1 => Label::U2,
            Label::U2 => Label::U1,
            Label::Interface => Label::Interface,
        };
        assert_eq!(labels[i], swapped);
    }
    let cone = cone_separation_check(&sol.partition, &p);
    assert_eq!(cone.violations, 0);
    assert!(cone.lipschitz_ok(), "{cone:?}");
    assert!(cone.cone_graph_lipschitz <= cone.bound + 1e-9);
    let split = sol.partition.split();
    assert!((split[0] - p.lower.cloud.total_mass).abs() <= 1e-9);
    assert!((split[1] - p.upper.cloud.total_mass).abs() <= 1e-9);
    let csv = partition_table(&p.source, &sol.partition).to_csv();
    assert_eq!(csv.lines().next().unwrap(), "index,x1,x2,label");
    assert_eq!(csv.lines().count(), p.source.len() + 1);
}

#[test]
fn asymmetric_pairs_respect_the_lipschitz_bound() {
    let sq = ConvexDomain::cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap();
    let cases = [
        (
            ConvexDomain::cuboid(&[0.3, 0.0], &[1.3, 1.0]).unwrap(),
            ConvexDomain::ball(&[-0.4, 0.0], 0.5).unwrap(),
            1.0,
        ),
        (
            ConvexDomain::ellipse_axes(&[0.5, 0.0], [0.8, 0.3], 0.4).unwrap(),
            sq.clone(),
            2.0,
        ),
    ];
    for (lower, upper, d) in cases {
        let cfg = TwoTargetConfig {
            source: sq.clone(),
            lower,
            upper,
            source_density: Density::Uniform(1.0),
            lower_density: Density::Uniform(1.0),
            upper_density: Density::Linear {
                a: 1.0,
                b: 0.5,
                axis: 0,
            },
            resolution: 16,
            record_timings: false,
            seed: 7,
        };
        let p = cfg.build(d).unwrap();
        let sol = solve_two_target(&p).unwrap();
        let cone = cone_separation_check(&sol.partition, &p);
        assert_eq!(cone.violations, 0, "{cone:?}");
        assert!(cone.lipschitz_ok(), "{cone:?}");
    }
}

#[test]
fn mislabeled_partition_is_detected() {
    let cfg = symmetric(12);
    let p = cfg.build(2.0).unwrap();
    let sol = solve_two_target(&p).unwrap();
    let mut part = sol.partition.clone();
    let deepest = (0..p.source.len())
        .min_by(|&a, &b| {
            p.source.points[a][1]
                .total_cmp(&p.source.points[b][1])
                .then(a.cmp(&b))
        })
        .unwrap();
    assert_eq!(part.labels[deepest], Label::U1);
    part.labels[deepest] = Label::U2;
    assert!(cone_separation_check(&part, &p).violations >= 1);
}

#[test]
fn sweep_is_deterministic_with_zero_violations() {
    let cfg = symmetric(12);
    let rows = two_target_sweep(&cfg, &[4.0, 8.0]).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(r.error.is_none(), "{:?}", r.error);
        assert_eq!(r.cone_violations, 0);
    }
    assert!(rows[1].flatness_f <= rows[0].flatness_f + 2.0 * (1.0 / 12.0));
    let a = two_target_table(&rows).to_csv();
    assert_eq!(a.lines().next().unwrap(), TWO_TARGET_COLUMNS.join(","));
    assert_eq!(
        a,
        two_target_table(&two_target_sweep(&cfg, &[4.0, 8.0]).unwrap()).to_csv()
    );
}

proptest! {
    #[test]
    fn interface_normal_scale_invariance(g1 in prop::collection::vec(-3.0..3.0f64, 2),
                                         g2 in prop::collection::vec(-3.0..3.0f64, 2),
                                         t in 0.01..100.0f64) {
        let d: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a - b).collect();
        prop_assume!(d.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let scaled: Vec<f64> = g2.iter().zip(&d).map(|(b, dd)| b + t * dd).collect();
        let n1 = interface_normal(&g1, &g2).unwrap();
        let n2 = interface_normal(&scaled, &g2).unwrap();
        for (a, b) in n1.iter().zip(&n2) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn interface_normal_examples() {
    assert_eq!(
        interface_normal(&[0.0, -1.0], &[0.0, 1.0]).unwrap(),
        vec![0.0, -1.0]
    );
    assert_eq!(
        interface_normal(&[1.0, 1.0], &[1.0, 1.0]),
        Err(Error::DegenerateInterfaceNormal)
    );
}
