//! Deterministic SVG rendering of 2-dimensional charts.

use std::fmt::Write as _;

use nalgebra::DVector;
use thiserror::Error;

use crate::domain::{ConvexDomain, ConvexSubset, DomainKind, SubsetShape};
use crate::projective::HomogeneousPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlotError {
    #[error("plots need a 2-dimensional chart, found dimension {0}")]
    UnsupportedPlotDimension(usize),
}

/// What to draw on top of the domain outline.
#[derive(Clone, Debug, Default)]
pub struct Overlays {
    pub orbit: Vec<HomogeneousPoint>,
    pub limit: Vec<HomogeneousPoint>,
    pub translates: Vec<ConvexSubset>,
    /// Sample points with their quotient class.
    pub classes: Vec<(HomogeneousPoint, usize)>,
}

const SIZE: f64 = 600.0;
const PAD: f64 = 20.0;
const OUTLINE_POINTS: usize = 360;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn sort_by_angle(mut pts: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let n = pts.len().max(1) as f64;
    let (cx, cy) = (
        pts.iter().map(|p| p[0]).sum::<f64>() / n,
        pts.iter().map(|p| p[1]).sum::<f64>() / n,
    );
    pts.sort_by(|a, b| {
        (a[1] - cy)
            .atan2(a[0] - cx)
            .total_cmp(&(b[1] - cy).atan2(b[0] - cx))
    });
    pts
}

fn outline(omega: &ConvexDomain) -> Vec<DVector<f64>> {
    match omega.kind() {
        DomainKind::Ellipsoid => omega
            .directions(OUTLINE_POINTS)
            .iter()
            .filter_map(|d| omega.ray_endpoint(d).ok())
            .filter_map(|p| omega.affine_coords(&p))
            .collect(),
        _ => sort_by_angle(
            omega
                .vertices()
                .iter()
                .filter_map(|v| HomogeneousPoint::new(v.clone()).ok())
                .filter_map(|p| omega.affine_coords(&p))
                .collect(),
        ),
    }
}

struct Frame {
    min: (f64, f64),
    max_y: f64,
    scale: f64,
}

impl Frame {
    fn new(pts: &[DVector<f64>]) -> Self {
        let (mut lo, mut hi) = (
            (f64::INFINITY, f64::INFINITY),
            (f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in pts {
            lo = (lo.0.min(p[0]), lo.1.min(p[1]));
            hi = (hi.0.max(p[0]), hi.1.max(p[1]));
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-12);
        Self {
            min: lo,
            max_y: hi.1,
            scale: (SIZE - 2.0 * PAD) / span,
        }
    }

    fn map(&self, p: &DVector<f64>) -> (f64, f64) {
        (
            PAD + (p[0] - self.min.0) * self.scale,
            PAD + (self.max_y - p[1]) * self.scale,
        )
    }
}

fn dots(
    out: &mut String,
    omega: &ConvexDomain,
    frame: &Frame,
    pts: &[HomogeneousPoint],
    r: f64,
    fill: &str,
) {
    for p in pts {
        if let Some(c) = omega.affine_coords(p) {
            let (x, y) = frame.map(&c);
            let _ = writeln!(
                out,
                r#"  <circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}"/>"#
            );
        }
    }
}

/// SVG text for the domain outline and the overlays.
pub fn emit_svg(omega: &ConvexDomain, overlays: &Overlays) -> Result<String, PlotError> {
    let k = omega.chart_basis().len();
    if k != 2 {
        return Err(PlotError::UnsupportedPlotDimension(k));
    }
    let boundary = outline(omega);
    let frame = Frame::new(&boundary);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let path: Vec<String> = boundary
        .iter()
        .map(|p| {
            let (x, y) = frame.map(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        out,
        r#"  <polygon points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        path.join(" ")
    );

    for t in &overlays.translates {
        let pts: Vec<DVector<f64>> = t
            .generators()
            .iter()
            .filter_map(|p| omega.affine_coords(p))
            .collect();
        match (t.shape(), pts.len()) {
            (SubsetShape::Whole, _) | (_, 0) => {}
            (_, 1) => {
                let (x, y) = frame.map(&pts[0]);
                let _ = writeln!(
                    out,
                    r##"  <circle cx="{x:.3}" cy="{y:.3}" r="2" fill="#555555"/>"##
                );
            }
            (_, 2) => {
                let ((x1, y1), (x2, y2)) = (frame.map(&pts[0]), frame.map(&pts[1]));
                let _ = writeln!(
                    out,
                    r##"  <line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#555555" stroke-width="0.8"/>"##
                );
            }
            _ => {
                let poly: Vec<String> = sort_by_angle(pts)
                    .iter()
                    .map(|p| {
                        let (x, y) = frame.map(p);
                        format!("{x:.3},{y:.3}")
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    r##"  <polygon points="{}" fill="#555555" fill-opacity="0.15" stroke="#555555" stroke-width="0.8"/>"##,
                    poly.join(" ")
                );
            }
        }
    }
    dots(&mut out, omega, &frame, &overlays.orbit, 1.5, "#1f77b4");
    dots(&mut out, omega, &frame, &overlays.limit, 1.2, "#d62728");
    for (p, class) in &overlays.classes {
        dots(
            &mut out,
            omega,
            &frame,
            std::slice::from_ref(p),
            2.5,
            PALETTE[class % PALETTE.len()],
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_overlays_draw_outline_only() {
        let ball = ConvexDomain::ball(2).unwrap();
        let s = emit_svg(&ball, &Overlays::default()).unwrap();
        assert_eq!(s.matches("<polygon").count(), 1);
        assert!(!s.contains("<circle"));
        assert_eq!(s, emit_svg(&ball, &Overlays::default()).unwrap());
    }

    #[test]
    fn three_dimensional_chart_rejected() {
        let ball = ConvexDomain::ball(3).unwrap();
        assert_eq!(
            emit_svg(&ball, &Overlays::default()).unwrap_err(),
            PlotError::UnsupportedPlotDimension(3)
        );
    }

    #[test]
    fn orbit_dots_are_drawn() {
        let ball = ConvexDomain::ball(2).unwrap();
        let o = Overlays {
            orbit: vec![
                HomogeneousPoint::from_chart(&[0.0, 0.0]).unwrap(),
                HomogeneousPoint::from_chart(&[0.5, 0.0]).unwrap(),
            ],
            ..Overlays::default()
        };
        let s = emit_svg(&ball, &o).unwrap();
        assert_eq!(s.matches("<circle").count(), 2);
        assert!(s.contains(r#"cx="300.000" cy="300.000""#));
    }
}
