use crate::convex_analysis::{excess_over_support, DiscretePotential};
use crate::error::{Error, Result};
use crate::vector::dist;

const FLAT_EXCESS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HolderFit {
    /// Estimated exponent in `s(r) ≈ C r^{1+beta}`.
    pub beta: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    /// Radii actually used, with their excess values.
    pub samples: Vec<(f64, f64)>,
}

/// Fits `log s(r) = (1 + beta) log r + c`, where `s(r)` is the largest excess
/// of the potential over its support plane at `base` within `B_r(base)`.
pub fn holder_exponent(p: &DiscretePotential, base: usize, radii: &[f64]) -> Result<HolderFit> {
    if radii.len() < 3 {
        return Err(Error::InvalidInput(
            "at least three radii are required".into(),
        ));
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidInput(
            "radii must be positive and decreasing".into(),
        ));
    }
    let excess = excess_over_support(p, base);
    let y0 = &p.cloud.points[base];
    let samples: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let s = p
                .cloud
                .points
                .iter()
                .zip(&excess)
                .filter(|(y, _)| dist(y, y0) <= r * (1.0 + 1e-12))
                .map(|(_, e)| *e)
                .fold(0.0_f64, f64::max);
            (r, s)
        })
        .filter(|&(_, s)| s > FLAT_EXCESS)
        .collect();
    if samples.len() < 2 {
        return Err(Error::FlatAtBasePoint);
    }
    let xs: Vec<f64> = samples.iter().map(|(r, _)| r.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, s)| s.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(HolderFit {
        beta: slope - 1.0,
        residual,
        samples,
    })
}
