//! Fixed-viewport SVG figures of 2-D scenes.

use std::fmt::Write as _;

use thiserror::Error;

use crate::freeboundary::FreeBoundary;
use crate::geometry::ConvexDomain;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;
const OUTLINE_SAMPLES: usize = 256;
const DOMAIN_COLOURS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("rendering unsupported for this dimension")]
pub struct RenderUnsupported;

/// Three decimals, with negative zero folded onto zero.
fn coord(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    format!("{:.3}", if r == 0.0 { 0.0 } else { r })
}

struct Frame {
    lo: [f64; 2],
    scale: f64,
    offset: [f64; 2],
}

impl Frame {
    fn fit(points: impl Iterator<Item = [f64; 2]>) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        if !lo[0].is_finite() {
            lo = [0.0, 0.0];
            hi = [1.0, 1.0];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        // centre the scene in the viewport
        let offset = [
            MARGIN + 0.5 * (SIZE - 2.0 * MARGIN - scale * (hi[0] - lo[0])),
            MARGIN + 0.5 * (SIZE - 2.0 * MARGIN - scale * (hi[1] - lo[1])),
        ];
        Self { lo, scale, offset }
    }

    fn map(&self, p: &[f64]) -> (String, String) {
        let x = self.offset[0] + self.scale * (p[0] - self.lo[0]);
        let y = SIZE - (self.offset[1] + self.scale * (p[1] - self.lo[1]));
        (coord(x), coord(y))
    }
}

/// Domain outlines, active points and the free boundary with normal ticks.
/// Element order follows the argument order, so equal inputs give equal bytes.
pub fn render_svg(
    domains: &[ConvexDomain],
    active: &[Vec<f64>],
    boundary: Option<&FreeBoundary>,
) -> Result<String, RenderUnsupported> {
    if domains.iter().any(|d| d.dim() != 2)
        || active.iter().any(|p| p.len() != 2)
        || boundary.is_some_and(|b| b.dim != 2)
    {
        return Err(RenderUnsupported);
    }
    let outlines: Vec<Vec<Vec<f64>>> = domains
        .iter()
        .map(|d| d.boundary_samples(OUTLINE_SAMPLES))
        .collect();
    let vertices: Vec<&[f64]> = boundary
        .into_iter()
        .flat_map(|b| b.vertices().map(|v| v.point.as_slice()))
        .collect();
    let frame = Frame::fit(
        outlines
            .iter()
            .flatten()
            .map(Vec::as_slice)
            .chain(active.iter().map(Vec::as_slice))
            .chain(vertices.iter().copied())
            .map(|p| [p[0], p[1]]),
    );
    let tick = 12.0 / frame.scale;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="800" viewBox="0 0 800 800">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="800" height="800" fill="#ffffff"/>"##
    );
    for (k, outline) in outlines.iter().enumerate() {
        let colour = DOMAIN_COLOURS[k % DOMAIN_COLOURS.len()];
        let pts: Vec<String> = outline
            .iter()
            .map(|p| {
                let (x, y) = frame.map(p);
                format!("{x},{y}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            pts.join(" ")
        );
    }
    if !active.is_empty() {
        let _ = writeln!(s, r##"<g fill="#7f7f7f" fill-opacity="0.6">"##);
        for p in active {
            let (x, y) = frame.map(p);
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="1.5"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }
    if let Some(b) = boundary {
        for comp in &b.components {
            let pts: Vec<String> = comp
                .iter()
                .map(|v| {
                    let (x, y) = frame.map(&v.point);
                    format!("{x},{y}")
                })
                .collect();
            let _ = writeln!(
                s,
                r##"<polyline points="{}" fill="none" stroke="#000000" stroke-width="2"/>"##,
                pts.join(" ")
            );
        }
        let _ = writeln!(s, r##"<g stroke="#ff7f0e" stroke-width="1">"##);
        for v in b.vertices() {
            let end: Vec<f64> = v
                .point
                .iter()
                .zip(&v.normal)
                .map(|(p, n)| p + tick * n)
                .collect();
            let (x1, y1) = frame.map(&v.point);
            let (x2, y2) = frame.map(&end);
            let _ = writeln!(s, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeboundary::BoundaryVertex;

    #[test]
    fn one_dimensional_input_is_refused() {
        let d = ConvexDomain::interval(0.0, 1.0).unwrap();
        let e = render_svg(&[d], &[], None).unwrap_err();
        assert_eq!(e.to_string(), "rendering unsupported for this dimension");
    }

    #[test]
    fn empty_boundary_draws_domains_and_points() {
        let d = ConvexDomain::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let svg = render_svg(&[d], &[vec![0.5, 0.5]], None).unwrap();
        assert!(svg.contains("<polygon"));
        assert!(svg.contains("<circle"));
        assert!(!svg.contains("<polyline"));
        assert!(svg.contains(r#"version="1.1""#));
        assert!(!svg.contains("href"));
    }

    #[test]
    fn deterministic_with_ticks() {
        let d = ConvexDomain::ball(&[0.0, 0.0], 1.0).unwrap();
        let fb = FreeBoundary {
            dim: 2,
            components: vec![vec![
                BoundaryVertex {
                    point: vec![-0.5, 0.0],
                    normal: vec![0.0, 1.0],
                    image: vec![0.0, 3.0],
                },
                BoundaryVertex {
                    point: vec![0.5, 0.0],
                    normal: vec![0.0, 1.0],
                    image: vec![0.0, 3.0],
                },
            ]],
            note: None,
        };
        let a = render_svg(std::slice::from_ref(&d), &[], Some(&fb)).unwrap();
        let b = render_svg(&[d], &[], Some(&fb)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<line").count(), 2);
        assert!(!a.contains("-0.000"));
    }
}
