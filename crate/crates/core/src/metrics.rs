//! Ground-truth jig shapes and reconstruction error metrics.
//!
//! Curves are compared point-by-point at matching arc length from their
//! origins. The comparison grid is uniform and spans the reconstruction; the
//! truth is evaluated on that grid directly, so it is effectively trimmed to
//! the sensor span.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconstruction::{grid_between, CurvatureProfile, PlanarShape, Point2};

/// Straight lead-in of the J-shape jig (mm).
pub const J_STRAIGHT_MM: f64 = 50.0;

/// Absolute slack (mm) allowed when the reconstruction runs past the truth.
pub const SPAN_TOLERANCE_MM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthKind {
    CShape,
    JShape,
    Custom,
}

impl FromStr for TruthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c_shape" | "c" => Ok(TruthKind::CShape),
            "j_shape" | "j" => Ok(TruthKind::JShape),
            "custom" => Ok(TruthKind::Custom),
            other => Err(Error::InvalidSpec(format!(
                "unknown shape kind `{other}` (expected c_shape|j_shape|custom)"
            ))),
        }
    }
}

impl std::fmt::Display for TruthKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TruthKind::CShape => "c_shape",
            TruthKind::JShape => "j_shape",
            TruthKind::Custom => "custom",
        })
    }
}

/// Expected shape of the sensor inside a jig.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub kind: TruthKind,
    /// Arc radius (mm); 0 for custom shapes.
    pub radius_mm: f64,
    /// Straight lead-in (mm); 0 for C shapes.
    pub straight_mm: f64,
    pub total_length_mm: f64,
    pub shape: PlanarShape,
    /// Set when the arc portion turns through more than a full circle.
    pub wraps: bool,
}

impl GroundTruth {
    /// Single circular arc starting at the origin heading along +x.
    pub fn c_shape(radius_mm: f64, total_length_mm: f64, spacing_mm: f64) -> Result<Self> {
        Self::analytic(
            TruthKind::CShape,
            radius_mm,
            0.0,
            total_length_mm,
            spacing_mm,
        )
    }

    /// Straight lead-in of `straight_mm` followed tangentially by an arc.
    pub fn j_shape(
        radius_mm: f64,
        straight_mm: f64,
        total_length_mm: f64,
        spacing_mm: f64,
    ) -> Result<Self> {
        if !(total_length_mm > straight_mm) {
            return Err(Error::InvalidSpec(format!(
                "J shape length {total_length_mm} mm must exceed its straight lead-in {straight_mm} mm"
            )));
        }
        Self::analytic(
            TruthKind::JShape,
            radius_mm,
            straight_mm,
            total_length_mm,
            spacing_mm,
        )
    }

    /// Arbitrary sampled shape; the first point is the origin.
    pub fn custom(shape: PlanarShape) -> Self {
        GroundTruth {
            kind: TruthKind::Custom,
            radius_mm: 0.0,
            straight_mm: 0.0,
            total_length_mm: shape.span(),
            shape,
            wraps: false,
        }
    }

    fn analytic(
        kind: TruthKind,
        radius_mm: f64,
        straight_mm: f64,
        total_length_mm: f64,
        spacing_mm: f64,
    ) -> Result<Self> {
        if !(radius_mm > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "truth radius must be > 0 mm, got {radius_mm}"
            )));
        }
        if !(total_length_mm > 0.0) || !(spacing_mm > 0.0) || straight_mm < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "truth length {total_length_mm} mm, lead-in {straight_mm} mm and spacing {spacing_mm} mm must be positive"
            )));
        }
        let mut truth = GroundTruth {
            kind,
            radius_mm,
            straight_mm,
            total_length_mm,
            shape: PlanarShape {
                points: vec![],
                headings: vec![],
                arc_lengths: vec![],
            },
            wraps: (total_length_mm - straight_mm) > 2.0 * std::f64::consts::PI * radius_mm,
        };
        let s = grid_between(0.0, total_length_mm, spacing_mm);
        truth.shape = PlanarShape::new(
            s.iter().map(|&s| truth.point_at(s)).collect(),
            s.iter().map(|&s| truth.heading_at(s)).collect(),
            s,
        )?;
        Ok(truth)
    }

    /// Exact point at arc length `s` from the origin (clamped to the shape).
    pub fn point_at(&self, s: f64) -> Point2 {
        let s = s.clamp(0.0, self.total_length_mm);
        match self.kind {
            TruthKind::Custom => self.shape.point_at(s),
            _ => {
                let lead = s.min(self.straight_mm);
                let arc = s - lead;
                let r = self.radius_mm;
                let phi = arc / r;
                Point2::new(lead + r * phi.sin(), r * (1.0 - phi.cos()))
            }
        }
    }

    /// Exact heading (rad) at arc length `s`.
    pub fn heading_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.total_length_mm);
        match self.kind {
            TruthKind::Custom => self.shape.heading_at(s),
            _ => (s - self.straight_mm).max(0.0) / self.radius_mm,
        }
    }

    /// Mean curvature (1/mm) over `[from, to]`, i.e. the heading change per
    /// unit length. This is what a gauge of that length would report.
    pub fn mean_curvature(&self, from: f64, to: f64) -> f64 {
        if to <= from {
            return 0.0;
        }
        (self.heading_at(to) - self.heading_at(from)) / (to - from)
    }

    /// Arc-length window holding the curved part of the shape.
    pub fn curved_window(&self, span_mm: f64) -> (f64, f64) {
        (self.straight_mm.min(span_mm), span_mm)
    }
}

/// Build a C- or J-shape truth; J shapes use the standard 50 mm lead-in.
pub fn make_ground_truth(
    kind: TruthKind,
    radius_mm: f64,
    total_length_mm: f64,
    spacing_mm: f64,
) -> Result<GroundTruth> {
    match kind {
        TruthKind::CShape => GroundTruth::c_shape(radius_mm, total_length_mm, spacing_mm),
        TruthKind::JShape => {
            GroundTruth::j_shape(radius_mm, J_STRAIGHT_MM, total_length_mm, spacing_mm)
        }
        TruthKind::Custom => Err(Error::InvalidSpec(
            "custom truths are built from a sampled shape, not a radius".into(),
        )),
    }
}

/// Uniform comparison grid shared by the reconstruction and the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    pub arc_lengths: Vec<f64>,
    pub recon: Vec<Point2>,
    pub truth: Vec<Point2>,
}

/// Nominal sample spacing of a shape: the median step.
pub fn nominal_spacing(shape: &PlanarShape) -> f64 {
    let mut steps: Vec<f64> = shape
        .arc_lengths
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > 0.0)
        .collect();
    if steps.is_empty() {
        return 0.0;
    }
    steps.sort_by(f64::total_cmp);
    steps[steps.len() / 2]
}

/// Pair points of both curves at equal arc length on a uniform grid.
///
/// `spacing_mm` defaults to the reconstruction's nominal spacing.
pub fn correspond(
    recon: &PlanarShape,
    truth: &GroundTruth,
    spacing_mm: Option<f64>,
) -> Result<Correspondence> {
    let span = recon.span();
    if span > truth.total_length_mm + SPAN_TOLERANCE_MM {
        return Err(Error::SpanMismatch {
            recon_mm: span,
            truth_mm: truth.total_length_mm,
        });
    }
    let spacing = spacing_mm.unwrap_or_else(|| nominal_spacing(recon));
    if !(spacing > 0.0) || !(span > 0.0) {
        return Err(Error::InsufficientData(
            "reconstruction has zero length".into(),
        ));
    }
    let arc_lengths = grid_between(0.0, span, spacing);
    Ok(Correspondence {
        recon: arc_lengths.iter().map(|&s| recon.point_at(s)).collect(),
        truth: arc_lengths.iter().map(|&s| truth.point_at(s)).collect(),
        arc_lengths,
    })
}

/// Distance between the reconstructed tip and the truth point at the same arc length.
pub fn tip_position_error(recon: &PlanarShape, truth: &GroundTruth) -> Result<f64> {
    let span = recon.span();
    if span > truth.total_length_mm + SPAN_TOLERANCE_MM {
        return Err(Error::SpanMismatch {
            recon_mm: span,
            truth_mm: truth.total_length_mm,
        });
    }
    Ok(recon.tip().distance(&truth.point_at(span)))
}

/// Mean pointwise distance over the comparison grid.
pub fn shape_error(
    recon: &PlanarShape,
    truth: &GroundTruth,
    spacing_mm: Option<f64>,
) -> Result<f64> {
    let c = correspond(recon, truth, spacing_mm)?;
    Ok(shape_error_of(&c))
}

fn shape_error_of(c: &Correspondence) -> f64 {
    let sum: f64 = c
        .recon
        .iter()
        .zip(&c.truth)
        .map(|(r, t)| r.distance(t))
        .sum();
    sum / c.recon.len() as f64
}

/// Unsigned shoelace area of a quadrilateral.
fn quad_area(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    let pts = [a, b, c, d];
    let twice: f64 = (0..4)
        .map(|i| {
            let (p, q) = (pts[i], pts[(i + 1) % 4]);
            p.x * q.y - q.x * p.y
        })
        .sum();
    0.5 * twice.abs()
}

/// Per-segment areas between the curves: `(mean, total)` in mm^2.
pub fn area_error(
    recon: &PlanarShape,
    truth: &GroundTruth,
    spacing_mm: Option<f64>,
) -> Result<(f64, f64)> {
    let c = correspond(recon, truth, spacing_mm)?;
    Ok(area_error_of(&c))
}

fn area_error_of(c: &Correspondence) -> (f64, f64) {
    let areas: Vec<f64> = (0..c.recon.len() - 1)
        .map(|i| quad_area(c.recon[i], c.recon[i + 1], c.truth[i + 1], c.truth[i]))
        .collect();
    let avg = areas.iter().sum::<f64>() / areas.len() as f64;
    (avg, avg * areas.len() as f64)
}

/// Mean of `1/|kappa|` over nonzero samples whose gauge segment lies inside
/// `[from, to]` mm.
pub fn average_radius(curv: &CurvatureProfile, region: (f64, f64)) -> Result<f64> {
    let (from, to) = region;
    let steps = crate::reconstruction::segment_lengths(&curv.positions)?;
    let slack = 1e-9 * to.abs().max(1.0);
    let radii: Vec<f64> = curv
        .positions
        .iter()
        .zip(&steps)
        .zip(&curv.curvatures)
        .filter(|((s, ds), k)| *s - *ds >= from - slack && **s <= to + slack && **k != 0.0)
        .map(|(_, k)| 1.0 / k.abs())
        .collect();
    if radii.is_empty() {
        return Err(Error::UndefinedRadius {
            from_mm: from,
            to_mm: to,
        });
    }
    Ok(radii.iter().sum::<f64>() / radii.len() as f64)
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub tip_error_mm: f64,
    pub shape_error_mm: f64,
    pub area_error_avg_mm2: f64,
    pub area_error_total_mm2: f64,
    pub average_radius_mm: f64,
    pub average_strain_ue: Option<f64>,
}

impl ErrorReport {
    pub const CSV_HEADER: &'static str = "trial,average_strain_ue,average_radius_mm,tip_error_mm,shape_error_mm,area_error_avg_mm2,area_error_total_mm2";

    pub fn csv_row(&self, trial: &str) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            trial,
            self.average_strain_ue
                .map(|e| e.to_string())
                .unwrap_or_default(),
            self.average_radius_mm,
            self.tip_error_mm,
            self.shape_error_mm,
            self.area_error_avg_mm2,
            self.area_error_total_mm2
        )
    }

    pub fn key_values(&self) -> String {
        let mut out = String::new();
        if let Some(e) = self.average_strain_ue {
            out.push_str(&format!("average_strain_ue = {e}\n"));
        }
        out.push_str(&format!("average_radius_mm = {}\n", self.average_radius_mm));
        out.push_str(&format!("tip_error_mm = {}\n", self.tip_error_mm));
        out.push_str(&format!("shape_error_mm = {}\n", self.shape_error_mm));
        out.push_str(&format!(
            "area_error_avg_mm2 = {}\n",
            self.area_error_avg_mm2
        ));
        out.push_str(&format!(
            "area_error_total_mm2 = {}\n",
            self.area_error_total_mm2
        ));
        out
    }
}

/// All metrics for one trial.
///
/// The average radius is taken over the curved part of the truth, from the
/// curvature profile when given, otherwise from the shape's headings.
pub fn evaluate(
    recon: &PlanarShape,
    truth: &GroundTruth,
    curvature: Option<&CurvatureProfile>,
    average_strain_ue: Option<f64>,
    spacing_mm: Option<f64>,
) -> Result<ErrorReport> {
    let c = correspond(recon, truth, spacing_mm)?;
    let (area_error_avg_mm2, area_error_total_mm2) = area_error_of(&c);
    let derived;
    let curv = match curvature {
        Some(c) => c,
        None => {
            derived = recon.segment_curvatures();
            &derived
        }
    };
    Ok(ErrorReport {
        tip_error_mm: tip_position_error(recon, truth)?,
        shape_error_mm: shape_error_of(&c),
        area_error_avg_mm2,
        area_error_total_mm2,
        average_radius_mm: average_radius(curv, truth.curved_window(recon.span()))?,
        average_strain_ue,
    })
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruction::{integrate_shape, Pose, Scheme};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: Point2, x: f64, y: f64, tol: f64) -> bool {
        (a.x - x).abs() < tol && (a.y - y).abs() < tol
    }

    #[test]
    fn half_circle_truth() {
        let t = GroundTruth::c_shape(60.0, PI * 60.0, 1.3).unwrap();
        assert!(close(t.shape.tip(), 0.0, 120.0, 1e-9));
        assert!(!t.wraps);
    }

    #[test]
    fn quarter_circle_truth() {
        let t = GroundTruth::c_shape(100.0, 100.0 * FRAC_PI_2, 1.3).unwrap();
        assert!(close(t.shape.tip(), 100.0, 100.0, 1e-9));
    }

    #[test]
    fn j_shape_truth() {
        let t = make_ground_truth(TruthKind::JShape, 100.0, 150.0, 1.3).unwrap();
        // (50 + 100 sin 1, 100 (1 - cos 1))
        assert!(close(t.shape.tip(), 134.147098, 45.969769, 1e-6));
        assert_eq!(t.heading_at(40.0), 0.0);
        assert!((t.mean_curvature(60.0, 70.0) - 0.01).abs() < 1e-15);
        assert!(make_ground_truth(TruthKind::JShape, 100.0, 40.0, 1.3).is_err());
    }

    #[test]
    fn full_circle_is_flagged() {
        let t = GroundTruth::c_shape(10.0, 100.0, 1.0).unwrap();
        assert!(t.wraps);
    }

    #[test]
    fn identical_curves_score_zero() {
        let t = GroundTruth::c_shape(80.0, 170.0, 1.3).unwrap();
        let r = evaluate(&t.shape, &t, None, None, None).unwrap();
        assert!(r.tip_error_mm < 1e-9);
        assert!(r.shape_error_mm < 1e-9);
        assert!(r.area_error_avg_mm2 < 1e-9);
        assert!((r.average_radius_mm - 80.0).abs() < 1e-6);
    }

    #[test]
    fn translation_gives_distance() {
        let t = GroundTruth::j_shape(60.0, 50.0, 150.0, 1.3).unwrap();
        let moved = t.shape.rigid_transform(3.0, 4.0, 0.0);
        assert!((tip_position_error(&moved, &t).unwrap() - 5.0).abs() < 1e-12);
        assert!((shape_error(&moved, &t, None).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_offset_rectangles() {
        let truth = GroundTruth::custom(
            PlanarShape::new(
                vec![Point2::new(0.0, 0.0), Point2::new(13.0, 0.0)],
                vec![0.0, 0.0],
                vec![0.0, 13.0],
            )
            .unwrap(),
        );
        let recon = truth.shape.rigid_transform(0.0, 2.0, 0.0);
        let (avg, total) = area_error(&recon, &truth, Some(1.3)).unwrap();
        assert!((avg - 2.0 * 1.3).abs() < 1e-9);
        assert!((total - 2.0 * 13.0).abs() < 1e-9);
    }

    #[test]
    fn span_mismatch() {
        let t = GroundTruth::c_shape(80.0, 100.0, 1.3).unwrap();
        let long = GroundTruth::c_shape(80.0, 120.0, 1.3).unwrap();
        assert!(matches!(
            tip_position_error(&long.shape, &t),
            Err(Error::SpanMismatch { .. })
        ));
        // shorter reconstruction compares against the trimmed truth
        assert!(tip_position_error(&t.shape, &long).unwrap() < 1e-9);
    }

    #[test]
    fn average_radius_cases() {
        let c = CurvatureProfile::constant(1.0 / 80.0, 100.0, 1.3);
        assert!((average_radius(&c, (0.0, 100.0)).unwrap() - 80.0).abs() < 1e-9);
        let z = CurvatureProfile::constant(0.0, 100.0, 1.3);
        assert!(matches!(
            average_radius(&z, (0.0, 100.0)),
            Err(Error::UndefinedRadius { .. })
        ));
    }

    #[test]
    fn exact_profile_reconstruction_is_close() {
        let t = GroundTruth::c_shape(100.0, 170.0, 1.3).unwrap();
        let c = CurvatureProfile::constant(0.01, 170.0, 1.3);
        let r = integrate_shape(&c, Pose::default(), Scheme::Midpoint).unwrap();
        assert!(shape_error(&r, &t, None).unwrap() < 0.05);
    }
}
