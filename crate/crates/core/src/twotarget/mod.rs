//! Balanced transport onto two hyperplane-separated targets: the induced
//! partition of the source, its interface, and the cone test for the
//! Lipschitz separation.

mod cone;
mod sweep;

pub use cone::{cone_separation_check, ConeReport};
pub use sweep::{
    two_target_sweep, two_target_sweep_detailed, two_target_sweep_row,
    two_target_sweep_row_detailed, two_target_table, TwoTargetConfig, TwoTargetRow,
    TWO_TARGET_COLUMNS,
};

use crate::error::{Error, Result};
use crate::freeboundary::contour::{zero_contour_2d, zero_crossings_1d, LatticeField};
use crate::freeboundary::{BoundaryVertex, FreeBoundary, BOUNDARY_TRIM};
use crate::geometry::{ConvexDomain, WeightedCloud};
use crate::table::{fmt_float, Table};
use crate::transport::{recover_duals, solve_balanced, DualPair, PartialProblem, TransportPlan};
use crate::vector::{dist, dot, norm, sub, unit};

/// Boundary samples per target when estimating the aperture (10⁴ pairs).
const APERTURE_SAMPLES: usize = 100;

/// One target piece; the domain is optional (point targets have none).
#[derive(Clone, Debug)]
pub struct TargetPiece {
    pub domain: Option<ConvexDomain>,
    pub cloud: WeightedCloud,
}

#[derive(Clone, Debug)]
pub struct TwoTargetProblem {
    pub source_domain: ConvexDomain,
    pub source: WeightedCloud,
    /// `V₁`, below the separating hyperplane.
    pub lower: TargetPiece,
    /// `V₂`, above it.
    pub upper: TargetPiece,
    /// Unit normal of the separating hyperplane, from `V₁` towards `V₂`.
    pub axis: Vec<f64>,
    /// `min (y₂ - y₁)·axis / |y₂ - y₁|` over sampled target pairs.
    pub alpha: f64,
}

fn aperture_samples(piece: &TargetPiece) -> Vec<Vec<f64>> {
    match &piece.domain {
        Some(d) => d.boundary_samples(APERTURE_SAMPLES),
        None => {
            let pts = &piece.cloud.points;
            let stride = pts.len().div_ceil(APERTURE_SAMPLES).max(1);
            pts.iter().step_by(stride).cloned().collect()
        }
    }
}

impl TwoTargetProblem {
    /// Checks balance and separation along the last axis and measures `alpha`.
    pub fn new(
        source_domain: ConvexDomain,
        source: WeightedCloud,
        lower: TargetPiece,
        upper: TargetPiece,
    ) -> Result<Self> {
        let dim = source.dim;
        if lower.cloud.dim != dim || upper.cloud.dim != dim {
            return Err(Error::InvalidInput(
                "source and targets differ in dimension".into(),
            ));
        }
        let g = lower.cloud.total_mass + upper.cloud.total_mass;
        if (source.total_mass - g).abs() > 1e-9 * source.total_mass.max(g) {
            return Err(Error::UnbalancedMasses {
                source_mass: source.total_mass,
                target_mass: g,
            });
        }
        let axis = unit(dim, dim - 1);
        let top1 = lower
            .cloud
            .points
            .iter()
            .map(|y| dot(y, &axis))
            .fold(f64::NEG_INFINITY, f64::max);
        let bot2 = upper
            .cloud
            .points
            .iter()
            .map(|y| dot(y, &axis))
            .fold(f64::INFINITY, f64::min);
        if !(top1 < bot2) {
            return Err(Error::NotSeparated);
        }
        let (s1, s2) = (aperture_samples(&lower), aperture_samples(&upper));
        let mut alpha = f64::INFINITY;
        for y1 in &s1 {
            for y2 in &s2 {
                let d = sub(y2, y1);
                alpha = alpha.min(dot(&d, &axis) / norm(&d));
            }
        }
        if !(alpha > 0.0) {
            return Err(Error::NotSeparated);
        }
        Ok(Self {
            source_domain,
            source,
            lower,
            upper,
            axis,
            alpha,
        })
    }

    /// The concatenated target cloud, `V₁` first.
    pub fn target(&self) -> Result<WeightedCloud> {
        let (a, b) = (&self.lower.cloud, &self.upper.cloud);
        let points = a.points.iter().chain(&b.points).cloned().collect();
        let weights = a.weights.iter().chain(&b.weights).copied().collect();
        WeightedCloud::new(points, weights, a.spacing.min(b.spacing))
    }

    pub fn n_lower(&self) -> usize {
        self.lower.cloud.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    U1,
    U2,
    /// Split between both targets.
    Interface,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::U1 => "U1",
            Label::U2 => "U2",
            Label::Interface => "interface",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub labels: Vec<Label>,
    /// Mass sent to `V₁` and `V₂` by each source point.
    pub mass_to: Vec<[f64; 2]>,
    pub interface: FreeBoundary,
}

impl Partition {
    pub fn indices(&self, label: Label) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i] == label)
            .collect()
    }

    /// Total mass received by each target.
    pub fn split(&self) -> [f64; 2] {
        self.mass_to
            .iter()
            .fold([0.0, 0.0], |acc, m| [acc[0] + m[0], acc[1] + m[1]])
    }
}

#[derive(Clone, Debug)]
pub struct TwoTargetSolution {
    pub problem: PartialProblem,
    pub plan: TransportPlan,
    pub duals: DualPair,
    pub partition: Partition,
}

/// `(Du₁ - Du₂) / |Du₁ - Du₂|`.
pub fn interface_normal(grad_u1: &[f64], grad_u2: &[f64]) -> Result<Vec<f64>> {
    let d = sub(grad_u1, grad_u2);
    let n = norm(&d);
    if !(n > 1e-12) {
        return Err(Error::DegenerateInterfaceNormal);
    }
    Ok(d.iter().map(|v| v / n).collect())
}

/// `u_k(x) = max_{j ∈ V_k} (x·y_j - φ_j)` with its maximizer.
struct Restricted<'a> {
    target: &'a WeightedCloud,
    phi: &'a [f64],
    range: std::ops::Range<usize>,
}

impl Restricted<'_> {
    fn eval(&self, x: &[f64]) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, self.range.start);
        for j in self.range.clone() {
            let v = dot(x, &self.target.points[j]) - self.phi[j];
            if v > best.0 {
                best = (v, j);
            }
        }
        best
    }
}

/// Balanced solve, partition by destination, and the interface as the zero
/// set of `u₁ - u₂` on the source grid.
pub fn solve_two_target(problem: &TwoTargetProblem) -> Result<TwoTargetSolution> {
    let target = problem.target()?;
    let full = PartialProblem::full(problem.source.clone(), target)?;
    let plan = solve_balanced(&full.source, &full.target)?;
    let duals = recover_duals(&full, &plan)?;
    let n1 = problem.n_lower();
    let src = &full.source;
    let mut mass_to = vec![[0.0, 0.0]; src.len()];
    for e in &plan.entries {
        mass_to[e.i][usize::from(e.j >= n1)] += e.mass;
    }
    let labels = mass_to
        .iter()
        .zip(&src.weights)
        .map(|(m, w)| {
            let tiny = 1e-12 * w;
            match (m[0] > tiny, m[1] > tiny) {
                (true, true) => Label::Interface,
                (false, true) => Label::U2,
                _ => Label::U1,
            }
        })
        .collect();
    let interface = extract_interface(problem, &full, &duals)?;
    Ok(TwoTargetSolution {
        problem: full,
        plan,
        duals,
        partition: Partition {
            labels,
            mass_to,
            interface,
        },
    })
}

fn extract_interface(
    problem: &TwoTargetProblem,
    full: &PartialProblem,
    duals: &DualPair,
) -> Result<FreeBoundary> {
    let src = &full.source;
    let dim = src.dim;
    if dim > 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let grid = src
        .grid
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("interface extraction needs a grid cloud".into()))?;
    if !(problem.lower.cloud.total_mass > 0.0 && problem.upper.cloud.total_mass > 0.0) {
        return Ok(FreeBoundary {
            dim,
            components: Vec::new(),
            note: Some("single target carries all mass".into()),
        });
    }
    let n1 = problem.n_lower();
    let u1 = Restricted {
        target: &full.target,
        phi: &duals.phi,
        range: 0..n1,
    };
    let u2 = Restricted {
        target: &full.target,
        phi: &duals.phi,
        range: n1..full.target.len(),
    };
    let domain = &problem.source_domain;
    let field = LatticeField::sample(
        &grid.origin,
        grid.step,
        &grid.shape,
        |p| domain.contains(p),
        |p| u1.eval(p).0 - u2.eval(p).0,
    );
    let raw: Vec<Vec<Vec<f64>>> = if dim == 1 {
        zero_crossings_1d(&field)
            .into_iter()
            .map(|p| vec![p])
            .collect()
    } else {
        zero_contour_2d(&field)
    };
    let trim = BOUNDARY_TRIM * grid.step;
    let mut components = Vec::new();
    for line in raw {
        let mut current: Vec<BoundaryVertex> = Vec::new();
        for p in line {
            if domain.boundary_distance(&p) < trim {
                if !current.is_empty() {
                    components.push(std::mem::take(&mut current));
                }
                continue;
            }
            if current.last().is_some_and(|v| dist(&v.point, &p) == 0.0) {
                continue;
            }
            let g1 = full.target.points[u1.eval(&p).1].clone();
            let g2 = &full.target.points[u2.eval(&p).1];
            let normal = interface_normal(&g1, g2)?;
            current.push(BoundaryVertex {
                point: p,
                normal,
                image: g1,
            });
        }
        if !current.is_empty() {
            components.push(current);
        }
    }
    let note = components.is_empty().then(|| "no interface".to_string());
    Ok(FreeBoundary {
        dim,
        components,
        note,
    })
}

/// Partition CSV: `index, x_1..x_n, label`.
pub fn partition_table(source: &WeightedCloud, partition: &Partition) -> Table {
    let mut header = vec!["index".to_string()];
    header.extend((1..=source.dim).map(|k| format!("x{k}")));
    header.push("label".into());
    let mut t = Table::new(&header);
    for (i, (x, l)) in source.points.iter().zip(&partition.labels).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(x.iter().map(|&v| fmt_float(v)));
        row.push(l.as_str().into());
        t.push(row);
    }
    t
}

/// Mass-splitting height: `∫_{x·axis > c} f` equals the mass of `V₂`.
pub fn splitting_height(problem: &TwoTargetProblem) -> f64 {
    let src = &problem.source;
    let heights: Vec<f64> = src.points.iter().map(|x| dot(x, &problem.axis)).collect();
    crate::asymptotics::height_with_mass_above(
        &heights,
        &src.weights,
        src.spacing,
        problem.upper.cloud.total_mass,
    )
}
