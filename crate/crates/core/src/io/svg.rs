//! Minimal SVG line plots of planar shapes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::io::tables::write_text;
use crate::reconstruction::PlanarShape;

pub struct Series<'a> {
    pub label: &'a str,
    pub shape: &'a PlanarShape,
    pub color: &'a str,
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Equal-aspect plot with +y up.
pub fn render(series: &[Series<'_>]) -> String {
    let pts = series.iter().flat_map(|s| s.shape.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let extent = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / extent;
    let map = |x: f64, y: f64| (MARGIN + (x - x0) * scale, SIZE - MARGIN - (y - y0) * scale);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, s) in series.iter().enumerate() {
        let coords: Vec<String> = s
            .shape
            .points
            .iter()
            .map(|p| {
                let (u, v) = map(p.x, p.y);
                format!("{u:.3},{v:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            s.color,
            coords.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="14" fill="{}">{}</text>"#,
            20.0 + 16.0 * i as f64,
            s.color,
            s.label
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="gray" text-anchor="end">{extent:.1} mm across</text>"#,
        SIZE - MARGIN,
        SIZE - 10.0
    );
    out.push_str("</svg>\n");
    out
}

pub fn write(path: &Path, series: &[Series<'_>]) -> Result<()> {
    write_text(path, &render(series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::GroundTruth;

    #[test]
    fn renders_one_polyline_per_series() {
        let t = GroundTruth::c_shape(60.0, 170.0, 1.3).unwrap();
        let svg = render(&[
            Series {
                label: "truth",
                shape: &t.shape,
                color: "black",
            },
            Series {
                label: "recon",
                shape: &t.shape,
                color: "red",
            },
        ]);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
