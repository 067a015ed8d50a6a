use crate::geometry::domain::{fibonacci_sphere, golden_min};
use crate::geometry::ConvexDomain;
use crate::vector::normalized;

/// Euclidean distance between two convex bodies.
///
/// Uses the separating-hyperplane dual `max_{|u|=1} -h_A(u) - h_B(-u)`,
/// sampled over directions and refined locally; clipped at zero.
pub fn separation_distance(a: &ConvexDomain, b: &ConvexDomain) -> f64 {
    assert_eq!(a.dim(), b.dim(), "domains must share a dimension");
    let gap = |u: &[f64]| {
        let neg: Vec<f64> = u.iter().map(|v| -v).collect();
        -a.support(u) - b.support(&neg)
    };
    let best = match a.dim() {
        1 => gap(&[1.0]).max(gap(&[-1.0])),
        2 => {
            let f = |t: f64| -gap(&[t.cos(), t.sin()]);
            let n = 3600;
            let step = std::f64::consts::TAU / n as f64;
            let mut best_t = 0.0;
            let mut best = f64::INFINITY;
            for i in 0..n {
                let t = i as f64 * step;
                let v = f(t);
                if v < best {
                    best = v;
                    best_t = t;
                }
            }
            let (_, refined) = golden_min(f, best_t - step, best_t + step, 1e-13);
            -(refined.min(best))
        }
        _ => {
            let dirs = fibonacci_sphere(4000);
            let mut u = dirs
                .iter()
                .max_by(|p, q| gap(p).total_cmp(&gap(q)))
                .cloned()
                .expect("nonempty direction set");
            let mut val = gap(&u);
            // pattern search on the sphere
            let mut h = 0.05;
            while h > 1e-10 {
                let mut improved = false;
                for k in 0..3 {
                    for s in [h, -h] {
                        let mut w = u.clone();
                        w[k] += s;
                        let w = normalized(&w).unwrap_or_else(|| u.clone());
                        let g = gap(&w);
                        if g > val {
                            val = g;
                            u = w;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    h *= 0.5;
                }
            }
            val
        }
    };
    best.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_balls() {
        let a = ConvexDomain::ball(&[0.0, 0.0], 1.0).unwrap();
        let b = ConvexDomain::ball(&[4.0, 0.0], 1.0).unwrap();
        assert!((separation_distance(&a, &b) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn facing_squares() {
        let a = ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let b = ConvexDomain::cuboid(&[3.0, 0.0], &[4.0, 1.0]).unwrap();
        assert!((separation_distance(&a, &b) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn overlapping_squares() {
        let a = ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let b = ConvexDomain::cuboid(&[0.5, 0.5], &[1.5, 1.5]).unwrap();
        assert_eq!(separation_distance(&a, &b), 0.0);
    }

    #[test]
    fn diagonal_squares_3d() {
        let a = ConvexDomain::cuboid(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        let b = ConvexDomain::cuboid(&[2.0, 2.0, 0.0], &[3.0, 3.0, 1.0]).unwrap();
        assert!((separation_distance(&a, &b) - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn intervals() {
        let a = ConvexDomain::interval(-1.0, 0.0).unwrap();
        let b = ConvexDomain::interval(2.0, 3.0).unwrap();
        assert!((separation_distance(&a, &b) - 2.0).abs() < 1e-12);
        assert!((separation_distance(&b, &a) - 2.0).abs() < 1e-12);
    }
}
