//! Zero level sets of scalar fields sampled on a regular lattice.

use std::collections::BTreeMap;

/// Field values at lattice nodes `origin + (k + ½)·step`; `None` marks nodes
/// outside the domain.
#[derive(Clone, Debug)]
pub struct LatticeField {
    pub origin: Vec<f64>,
    pub step: f64,
    pub shape: Vec<usize>,
    /// Row-major, last axis fastest.
    pub values: Vec<Option<f64>>,
}

impl LatticeField {
    /// Samples `f` at the node centres accepted by `inside`.
    pub fn sample(
        origin: &[f64],
        step: f64,
        shape: &[usize],
        inside: impl Fn(&[f64]) -> bool,
        f: impl Fn(&[f64]) -> f64,
    ) -> Self {
        let total: usize = shape.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..total {
            let p: Vec<f64> = idx
                .iter()
                .zip(origin)
                .map(|(&k, o)| o + (k as f64 + 0.5) * step)
                .collect();
            values.push(inside(&p).then(|| f(&p)));
            for k in (0..shape.len()).rev() {
                idx[k] += 1;
                if idx[k] < shape[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self {
            origin: origin.to_vec(),
            step,
            shape: shape.to_vec(),
            values,
        }
    }

    fn node(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.origin)
            .map(|(&k, o)| o + (k as f64 + 0.5) * self.step)
            .collect()
    }

    fn at2(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.shape[1] + j]
    }
}

fn crossing(a: &[f64], b: &[f64], fa: f64, fb: f64) -> Vec<f64> {
    let t = if fa == fb {
        0.5
    } else {
        (fa / (fa - fb)).clamp(0.0, 1.0)
    };
    a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect()
}

/// Sign-change points between consecutive valid nodes of a 1-D lattice.
pub fn zero_crossings_1d(field: &LatticeField) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for k in 0..field.shape[0].saturating_sub(1) {
        if let (Some(a), Some(b)) = (field.values[k], field.values[k + 1]) {
            if (a >= 0.0) != (b >= 0.0) {
                out.push(crossing(&field.node(&[k]), &field.node(&[k + 1]), a, b));
            }
        }
    }
    out
}

/// Edge of the 2-D lattice: `(i, j, horizontal)` joins node (i, j) with
/// (i, j+1) when horizontal, else with (i+1, j).
type EdgeKey = (usize, usize, bool);

/// Marching squares over lattice cells whose four corners are valid.
/// Returns polylines ordered along the curve; closed loops repeat their first point.
pub fn zero_contour_2d(field: &LatticeField) -> Vec<Vec<Vec<f64>>> {
    let (ni, nj) = (field.shape[0], field.shape[1]);
    let mut points: BTreeMap<EdgeKey, Vec<f64>> = BTreeMap::new();
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    let mut edge_point = |key: EdgeKey, fa: f64, fb: f64| {
        points.entry(key).or_insert_with(|| {
            let (i, j, h) = key;
            let a = field.node(&[i, j]);
            let b = if h {
                field.node(&[i, j + 1])
            } else {
                field.node(&[i + 1, j])
            };
            crossing(&a, &b, fa, fb)
        });
        key
    };
    for i in 0..ni.saturating_sub(1) {
        for j in 0..nj.saturating_sub(1) {
            let (Some(f00), Some(f01), Some(f10), Some(f11)) = (
                field.at2(i, j),
                field.at2(i, j + 1),
                field.at2(i + 1, j),
                field.at2(i + 1, j + 1),
            ) else {
                continue;
            };
            // corners counter-clockwise in (i, j): 00, 10, 11, 01
            let pos = [f00 >= 0.0, f10 >= 0.0, f11 >= 0.0, f01 >= 0.0];
            let mask = pos
                .iter()
                .enumerate()
                .fold(0u8, |m, (k, &p)| m | ((p as u8) << k));
            if mask == 0 || mask == 15 {
                continue;
            }
            // edges: 0 = 00-10, 1 = 10-11, 2 = 01-11, 3 = 00-01
            let mut e = |k: usize| match k {
                0 => edge_point((i, j, false), f00, f10),
                1 => edge_point((i + 1, j, true), f10, f11),
                2 => edge_point((i, j + 1, false), f01, f11),
                _ => edge_point((i, j, true), f00, f01),
            };
            let centre_pos = 0.25 * (f00 + f01 + f10 + f11) >= 0.0;
            let pairs: Vec<(usize, usize)> = match mask {
                1 | 14 => vec![(3, 0)],
                2 | 13 => vec![(0, 1)],
                3 | 12 => vec![(3, 1)],
                4 | 11 => vec![(1, 2)],
                6 | 9 => vec![(0, 2)],
                7 | 8 => vec![(3, 2)],
                5 => {
                    if centre_pos {
                        vec![(3, 2), (0, 1)]
                    } else {
                        vec![(3, 0), (1, 2)]
                    }
                }
                10 => {
                    if centre_pos {
                        vec![(3, 0), (1, 2)]
                    } else {
                        vec![(3, 2), (0, 1)]
                    }
                }
                _ => unreachable!(),
            };
            for (a, b) in pairs {
                let ka = e(a);
                let kb = e(b);
                segments.push((ka, kb));
            }
        }
    }
    chain(&segments, &points)
}

fn chain(
    segments: &[(EdgeKey, EdgeKey)],
    points: &BTreeMap<EdgeKey, Vec<f64>>,
) -> Vec<Vec<Vec<f64>>> {
    let mut adj: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(s);
        adj.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start: EdgeKey, used: &mut Vec<bool>| {
        let mut line = vec![start];
        let mut cur = start;
        loop {
            let next = adj[&cur].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segments[s];
            cur = if a == cur { b } else { a };
            line.push(cur);
        }
        line
    };
    // open chains first, from their endpoints in key order
    let ends: Vec<EdgeKey> = adj
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(k, _)| *k)
        .collect();
    for k in ends {
        if adj[&k].iter().all(|&s| used[s]) {
            continue;
        }
        out.push(walk(k, &mut used));
    }
    let keys: Vec<EdgeKey> = adj.keys().copied().collect();
    for k in keys {
        if adj[&k].iter().any(|&s| !used[s]) {
            out.push(walk(k, &mut used));
        }
    }
    out.into_iter()
        .map(|line| line.iter().map(|k| points[k].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::norm;

    #[test]
    fn circle_contour_is_closed_and_accurate() {
        let f = LatticeField::sample(&[-1.0, -1.0], 0.05, &[40, 40], |_| true, |p| 0.5 - norm(p));
        let lines = zero_contour_2d(&f);
        assert_eq!(lines.len(), 1);
        let line = &lines[0];
        assert_eq!(line.first(), line.last());
        for p in line {
            assert!((norm(p) - 0.5).abs() < 0.01);
        }
        for w in line.windows(2) {
            assert!(crate::vector::dist(&w[0], &w[1]) <= 2.0 * 0.05);
        }
    }

    #[test]
    fn straight_line_is_open() {
        let f = LatticeField::sample(&[0.0, 0.0], 0.1, &[10, 10], |_| true, |p| p[1] - 0.52);
        let lines = zero_contour_2d(&f);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].len(), 10);
        assert!(lines[0].iter().all(|p| (p[1] - 0.52).abs() < 1e-12));
    }

    #[test]
    fn one_dimensional_crossing() {
        let f = LatticeField::sample(&[-1.0], 0.125, &[8], |_| true, |p| p[0] + 0.5);
        let c = zero_crossings_1d(&f);
        assert_eq!(c.len(), 1);
        assert!((c[0][0] + 0.5).abs() < 1e-12);
    }
}
