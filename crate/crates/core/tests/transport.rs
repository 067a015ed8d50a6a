mod support;

use std::collections::BTreeMap;

use freebound::geometry::WeightedCloud;
use freebound::transport::{
    max_feasibility_violation, recover_duals, solve_balanced, solve_partial, PartialProblem,
};
use proptest::prelude::*;

fn cloud(pts: Vec<((f64, f64), f64)>, shift: [f64; 2]) -> WeightedCloud {
    let (points, weights): (Vec<_>, Vec<_>) = pts
        .into_iter()
        .map(|((x, y), w)| (vec![x + shift[0], y + shift[1]], w))
        .unzip();
    WeightedCloud::new(points, weights, 0.1).unwrap()
}

fn raw_points(max: usize) -> impl Strategy<Value = Vec<((f64, f64), f64)>> {
    prop::collection::vec(((0.0..1.0f64, 0.0..1.0f64), 0.1..1.0f64), 1..=max)
}

fn support(plan: &freebound::transport::TransportPlan) -> BTreeMap<(usize, usize), f64> {
    plan.entries.iter().map(|e| ((e.i, e.j), e.mass)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_the_dense_lp(f in raw_points(12), g in raw_points(12), frac in 0.05..1.0f64, gx in 0.0..3.0f64) {
        let (f, g) = (cloud(f, [0.0, 0.0]), cloud(g, [gx, 0.5]));
        let m = frac * f.total_mass.min(g.total_mass);
        let lp = support::lp_partial(&f, &g, m);
        let p = PartialProblem::new(f, g, m).unwrap();
        let plan = solve_partial(&p).unwrap();
        prop_assert!((plan.objective - lp.objective).abs() <= 1e-9 * lp.objective.abs().max(1.0),
            "{} vs {}", plan.objective, lp.objective);
        prop_assert!((plan.mass - m).abs() <= 1e-12);
    }

    #[test]
    fn duals_close_the_gap_and_stay_feasible(f in raw_points(12), g in raw_points(12), frac in 0.05..1.0f64) {
        let (f, g) = (cloud(f, [0.0, 0.0]), cloud(g, [2.0, 0.0]));
        let m = frac * f.total_mass.min(g.total_mass);
        let p = PartialProblem::new(f, g, m).unwrap();
        let plan = solve_partial(&p).unwrap();
        let d = recover_duals(&p, &plan).unwrap();
        prop_assert!(d.gap.abs() <= 1e-6 * plan.objective.abs());
        prop_assert!(max_feasibility_violation(&p, &d) <= 1e-9);
        // disjoint clouds never route mass through the reservoirs directly
        prop_assert_eq!(plan.reservoir_mass, 0.0);
        for (i, r) in plan.row_sums(p.source.len()).iter().enumerate() {
            prop_assert!(*r <= p.source.weights[i] * (1.0 + 1e-12));
        }
        for (j, c) in plan.col_sums(p.target.len()).iter().enumerate() {
            prop_assert!(*c <= p.target.weights[j] * (1.0 + 1e-12));
        }
    }

    /// With both marginals used in full, translating the target leaves the
    /// plan's support and masses unchanged.
    #[test]
    fn balanced_plans_are_translation_equivariant(
        f in raw_points(10),
        g in raw_points(10),
        tx in -4.0..4.0f64,
        ty in -4.0..4.0f64,
    ) {
        // independent target rescaled to the source total
        let (fm, gm) = (f.iter().map(|p| p.1).sum::<f64>(), g.iter().map(|p| p.1).sum::<f64>());
        let g: Vec<((f64, f64), f64)> = g.into_iter().map(|(p, w)| (p, w * fm / gm)).collect();
        let f = cloud(f, [0.0, 0.0]);
        let a = solve_balanced(&f, &cloud(g.clone(), [3.0, 0.0])).unwrap();
        let b = solve_balanced(&f, &cloud(g, [3.0 + tx, ty])).unwrap();
        let (sa, sb) = (support(&a), support(&b));
        prop_assert_eq!(sa.keys().collect::<Vec<_>>(), sb.keys().collect::<Vec<_>>());
        for (k, m) in &sa {
            prop_assert!((m - sb[k]).abs() <= 1e-12);
        }
    }
}

#[test]
fn translation_can_change_a_partial_plan() {
    // the nearer source point is taken, so moving the target across flips the choice
    let f = WeightedCloud::new(vec![vec![0.0], vec![1.0]], vec![1.0, 1.0], 1.0).unwrap();
    let right = WeightedCloud::new(vec![vec![10.0]], vec![1.0], 1.0).unwrap();
    let left = WeightedCloud::new(vec![vec![-10.0]], vec![1.0], 1.0).unwrap();
    let a = solve_partial(&PartialProblem::new(f.clone(), right, 1.0).unwrap()).unwrap();
    let b = solve_partial(&PartialProblem::new(f, left, 1.0).unwrap()).unwrap();
    assert_eq!(a.entries[0].i, 1);
    assert_eq!(b.entries[0].i, 0);
}

#[test]
fn one_dimensional_monotone_oracle() {
    use freebound::geometry::{discretize, ConvexDomain};
    for (res, m) in [(16, 0.25), (64, 0.5), (40, 0.9)] {
        let f = discretize(&ConvexDomain::interval(-1.0, 0.0).unwrap(), |_| 1.0, res).unwrap();
        let g = discretize(
            &ConvexDomain::interval(2.0, 3.0).unwrap(),
            |x| 1.0 + x[0] - 2.0,
            res,
        )
        .unwrap();
        let want = support::monotone_1d(&f, &g, m);
        let plan = solve_partial(&PartialProblem::new(f, g, m).unwrap()).unwrap();
        assert!(
            (plan.objective - want).abs() <= 1e-9,
            "{} vs {want}",
            plan.objective
        );
    }
}
