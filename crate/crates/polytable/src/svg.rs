//! Minimal SVG emitter for curve + zero-scatter figures.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::locus::{Bbox, CurvePolyline};

#[derive(Clone, Copy, Debug)]
pub struct FigureStyle {
    pub width: u32,
    pub height: u32,
    pub stroke_width: f64,
    pub point_radius: f64,
}

impl Default for FigureStyle {
    fn default() -> Self {
        FigureStyle {
            width: 800,
            height: 640,
            stroke_width: 1.5,
            point_radius: 2.5,
        }
    }
}

const MARGIN: f64 = 30.0;

/// Renders the traced curve (blue polylines) and the zero scatter (red dots)
/// into a standalone SVG document.
pub fn render_figure(
    curve: &CurvePolyline<f64>,
    zeros: &[Complex64],
    bbox: Bbox<f64>,
    style: &FigureStyle,
) -> String {
    let w = style.width as f64;
    let h = style.height as f64;
    let sx = (w - 2.0 * MARGIN) / (bbox.x_max - bbox.x_min);
    let sy = (h - 2.0 * MARGIN) / (bbox.y_max - bbox.y_min);
    let px = |z: Complex64| -> (f64, f64) {
        (
            MARGIN + (z.re - bbox.x_min) * sx,
            h - MARGIN - (z.im - bbox.y_min) * sy,
        )
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        style.width, style.height, style.width, style.height
    );
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>",
        style.width, style.height
    );
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>",
        w - 2.0 * MARGIN,
        h - 2.0 * MARGIN
    );
    for seg in &curve.segments {
        if seg.len() < 2 {
            continue;
        }
        let mut pts = String::new();
        for &p in seg {
            let (x, y) = px(p);
            let _ = write!(pts, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"{}\"/>",
            pts.trim_end(),
            style.stroke_width
        );
    }
    for &z in zeros {
        if z.re < bbox.x_min || z.re > bbox.x_max || z.im < bbox.y_min || z.im > bbox.y_max {
            continue;
        }
        let (x, y) = px(z);
        let _ = writeln!(
            s,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{}\" fill=\"#c23b3b\"/>",
            style.point_radius
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_curve_and_points() {
        let bbox = Bbox::new(-1.0, 1.0, -1.0, 1.0);
        let curve = CurvePolyline {
            segments: vec![vec![
                Complex64::new(-0.5, 0.0),
                Complex64::new(0.0, 0.5),
                Complex64::new(0.5, 0.0),
            ]],
            bbox,
            grid_step: 0.1,
        };
        let svg = render_figure(
            &curve,
            &[Complex64::new(0.0, 0.0), Complex64::new(5.0, 5.0)],
            bbox,
            &FigureStyle::default(),
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        // the out-of-bbox point is dropped
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn deterministic_output() {
        let bbox = Bbox::new(0.0, 2.0, -1.0, 1.0);
        let curve = CurvePolyline {
            segments: vec![],
            bbox,
            grid_step: 0.1,
        };
        let zeros = [Complex64::new(1.0, 1.0 / 3.0)];
        let a = render_figure(&curve, &zeros, bbox, &FigureStyle::default());
        let b = render_figure(&curve, &zeros, bbox, &FigureStyle::default());
        assert_eq!(a, b);
    }
}
