//! Distributed strain -> curvature -> planar shape.
//!
//! Each strain sample is mapped through the calibrated power law to a signed
//! curvature, then the curve is marched segment by segment: heading advances
//! by `kappa * ds` and the point moves a chord of length `ds` along the
//! heading chosen by [`Scheme`].

mod profile;

pub(crate) use profile::grid_between;
pub use profile::{resample_profile, segment_lengths, uniform_grid, ProfileMeta, StrainProfile};

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calibration::PowerLawModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Starting point and heading (rad) of a reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose { x, y, theta }
    }
}

/// Which side the assembly bends toward for positive strain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BendSign {
    /// Positive strain bends toward +y (counter-clockwise).
    #[default]
    Positive,
    Negative,
}

impl BendSign {
    pub fn factor(self) -> f64 {
        match self {
            BendSign::Positive => 1.0,
            BendSign::Negative => -1.0,
        }
    }

    pub fn from_i64(v: i64) -> Option<Self> {
        match v {
            1 => Some(BendSign::Positive),
            -1 => Some(BendSign::Negative),
            _ => None,
        }
    }
}

/// Heading used for each chord.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Heading at the middle of the step, `theta_i + kappa_i * ds_i / 2`.
    #[default]
    Midpoint,
    /// Heading at the start of the step, `theta_i`.
    Euler,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(Scheme::Midpoint),
            "euler" => Ok(Scheme::Euler),
            other => Err(Error::InvalidSpec(format!(
                "unknown integration scheme `{other}` (expected midpoint|euler)"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Midpoint => "midpoint",
            Scheme::Euler => "euler",
        })
    }
}

/// Signed curvature (1/mm) on the grid of the strain profile it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    pub positions: Vec<f64>,
    pub curvatures: Vec<f64>,
}

impl CurvatureProfile {
    pub fn new(positions: Vec<f64>, curvatures: Vec<f64>) -> Result<Self> {
        if positions.len() != curvatures.len() {
            return Err(Error::InvalidSpec(format!(
                "{} positions but {} curvature samples",
                positions.len(),
                curvatures.len()
            )));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec(
                "curvature positions must be strictly increasing".into(),
            ));
        }
        Ok(CurvatureProfile {
            positions,
            curvatures,
        })
    }

    /// Constant curvature over `(0, length]` sampled every `spacing` mm.
    pub fn constant(curvature: f64, length_mm: f64, spacing_mm: f64) -> Self {
        let positions = uniform_grid(length_mm, spacing_mm);
        let curvatures = vec![curvature; positions.len()];
        CurvatureProfile {
            positions,
            curvatures,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Curvatures in 1/m, the unit jig curvatures are usually quoted in.
    pub fn per_metre(&self) -> Vec<f64> {
        self.curvatures.iter().map(|k| k * 1000.0).collect()
    }

    /// True when every sample respects the assembly's bend limit.
    pub fn within_bend_limit(&self, min_bend_radius_mm: f64) -> bool {
        let k_max = 1.0 / min_bend_radius_mm;
        self.curvatures.iter().all(|k| k.abs() <= k_max)
    }
}

/// Ordered planar polyline with headings and cumulative arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarShape {
    pub points: Vec<Point2>,
    pub headings: Vec<f64>,
    /// Cumulative arc length from the first point (mm).
    pub arc_lengths: Vec<f64>,
}

impl PlanarShape {
    pub fn new(points: Vec<Point2>, headings: Vec<f64>, arc_lengths: Vec<f64>) -> Result<Self> {
        if points.len() != headings.len() || points.len() != arc_lengths.len() {
            return Err(Error::InvalidSpec(
                "shape columns must have equal lengths".into(),
            ));
        }
        if points.len() < 2 {
            return Err(Error::InsufficientData(
                "a shape needs at least 2 points".into(),
            ));
        }
        if arc_lengths.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpec(
                "shape arc lengths must be nondecreasing".into(),
            ));
        }
        Ok(PlanarShape {
            points,
            headings,
            arc_lengths,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn span(&self) -> f64 {
        self.arc_lengths[self.arc_lengths.len() - 1] - self.arc_lengths[0]
    }

    pub fn tip(&self) -> Point2 {
        self.points[self.points.len() - 1]
    }

    /// Sum of the chord lengths between consecutive points.
    pub fn polyline_length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }

    /// Point at arc length `s` (measured from the first point), linearly
    /// interpolated along the polyline and clamped to its ends.
    pub fn point_at(&self, s: f64) -> Point2 {
        let s = s + self.arc_lengths[0];
        let a = &self.arc_lengths;
        let k = a.partition_point(|&x| x <= s);
        if k == 0 {
            return self.points[0];
        }
        if k >= a.len() {
            return self.tip();
        }
        let (s0, s1) = (a[k - 1], a[k]);
        let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        let (p0, p1) = (self.points[k - 1], self.points[k]);
        Point2::new(p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y))
    }

    /// Heading at arc length `s`, linearly interpolated.
    pub fn heading_at(&self, s: f64) -> f64 {
        let s = s + self.arc_lengths[0];
        let a = &self.arc_lengths;
        let k = a.partition_point(|&x| x <= s);
        if k == 0 {
            return self.headings[0];
        }
        if k >= a.len() {
            return self.headings[a.len() - 1];
        }
        let (s0, s1) = (a[k - 1], a[k]);
        let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        self.headings[k - 1] + t * (self.headings[k] - self.headings[k - 1])
    }

    /// Rotate by `theta` about the origin, then translate by `(dx, dy)`.
    pub fn rigid_transform(&self, dx: f64, dy: f64, theta: f64) -> PlanarShape {
        let (sin, cos) = theta.sin_cos();
        PlanarShape {
            points: self
                .points
                .iter()
                .map(|p| Point2::new(cos * p.x - sin * p.y + dx, sin * p.x + cos * p.y + dy))
                .collect(),
            headings: self.headings.iter().map(|h| h + theta).collect(),
            arc_lengths: self.arc_lengths.clone(),
        }
    }

    /// Segment curvatures `dtheta / ds` recovered from consecutive headings,
    /// positioned at the end of each segment.
    pub fn segment_curvatures(&self) -> CurvatureProfile {
        let mut positions = Vec::with_capacity(self.len() - 1);
        let mut curvatures = Vec::with_capacity(self.len() - 1);
        for i in 1..self.len() {
            let ds = self.arc_lengths[i] - self.arc_lengths[i - 1];
            if ds <= 0.0 {
                continue;
            }
            positions.push(self.arc_lengths[i] - self.arc_lengths[0]);
            curvatures.push((self.headings[i] - self.headings[i - 1]) / ds);
        }
        CurvatureProfile {
            positions,
            curvatures,
        }
    }
}

/// Map strain samples (ue) to signed curvature (1/mm).
///
/// Samples whose magnitude does not exceed `straight_threshold_ue` read as
/// straight. Otherwise `kappa = sign * sgn(strain) / radius(|strain|)`, so
/// strain of the opposite polarity bends the other way.
pub fn strains_to_curvatures(
    model: &PowerLawModel,
    profile: &StrainProfile,
    straight_threshold_ue: f64,
    sign: BendSign,
) -> Result<CurvatureProfile> {
    model.validate()?;
    if !(straight_threshold_ue >= 0.0) {
        return Err(Error::InvalidSpec(format!(
            "straight threshold must be >= 0 ue, got {straight_threshold_ue}"
        )));
    }
    let curvatures = profile
        .strains()
        .iter()
        .map(|&e| {
            if e.abs() <= straight_threshold_ue || e == 0.0 {
                Ok(0.0)
            } else {
                let rho = model.strain_to_radius(e.abs())?.value;
                Ok(sign.factor() * e.signum() / rho)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CurvatureProfile {
        positions: profile.positions().to_vec(),
        curvatures,
    })
}

/// March the curvature profile into a planar shape starting at `pose`.
///
/// The output has one more point than the profile has samples: the initial
/// pose followed by the end of every gauge segment. Consecutive points are
/// exactly `ds_i` apart.
pub fn integrate_shape(curv: &CurvatureProfile, pose: Pose, scheme: Scheme) -> Result<PlanarShape> {
    let steps = segment_lengths(&curv.positions)?;
    let n = steps.len();
    let mut points = Vec::with_capacity(n + 1);
    let mut headings = Vec::with_capacity(n + 1);
    let mut arc_lengths = Vec::with_capacity(n + 1);

    let (mut x, mut y, mut theta, mut s) = (pose.x, pose.y, pose.theta, 0.0);
    points.push(Point2::new(x, y));
    headings.push(theta);
    arc_lengths.push(s);

    for (&kappa, &ds) in curv.curvatures.iter().zip(&steps) {
        let turn = kappa * ds;
        let chord_heading = match scheme {
            Scheme::Midpoint => theta + 0.5 * turn,
            Scheme::Euler => theta,
        };
        let (sin, cos) = chord_heading.sin_cos();
        x += cos * ds;
        y += sin * ds;
        theta += turn;
        s += ds;
        points.push(Point2::new(x, y));
        headings.push(theta);
        arc_lengths.push(s);
    }

    Ok(PlanarShape {
        points,
        headings,
        arc_lengths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn arc_tip(kappa: f64, length: f64) -> Point2 {
        Point2::new(
            (kappa * length).sin() / kappa,
            (1.0 - (kappa * length).cos()) / kappa,
        )
    }

    #[test]
    fn zero_curvature_is_straight() {
        let c = CurvatureProfile::constant(0.0, 100.0, 1.3);
        let shape = integrate_shape(&c, Pose::default(), Scheme::Midpoint).unwrap();
        assert_eq!(shape.len(), c.len() + 1);
        assert!((shape.tip().x - 100.0).abs() < 1e-9);
        assert!(shape.tip().y.abs() < 1e-12);
    }

    #[test]
    fn quarter_circle_tip() {
        let k = 1.0 / 100.0;
        let length = FRAC_PI_2 / k;
        let c = CurvatureProfile::constant(k, length, 1.3);
        let shape = integrate_shape(&c, Pose::default(), Scheme::Midpoint).unwrap();
        let exact = arc_tip(k, length);
        assert!((exact.x - 100.0).abs() < 1e-9 && (exact.y - 100.0).abs() < 1e-9);
        assert!(shape.tip().distance(&exact) < 0.05);
        assert!((shape.headings.last().unwrap() - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn half_circle_tip() {
        let k = 1.0 / 60.0;
        let length = PI / k;
        let c = CurvatureProfile::constant(k, length, 1.3);
        let shape = integrate_shape(&c, Pose::default(), Scheme::Midpoint).unwrap();
        assert!(shape.tip().distance(&Point2::new(0.0, 120.0)) < 0.05);
        assert!((shape.headings.last().unwrap() - PI).abs() < 1e-9);
    }

    #[test]
    fn euler_has_larger_tip_bias_than_midpoint() {
        let k = 1.0 / 100.0;
        let length = 170.0;
        let c = CurvatureProfile::constant(k, length, 1.3);
        let exact = arc_tip(k, length);
        let mid = integrate_shape(&c, Pose::default(), Scheme::Midpoint).unwrap();
        let eul = integrate_shape(&c, Pose::default(), Scheme::Euler).unwrap();
        let e_mid = mid.tip().distance(&exact);
        let e_eul = eul.tip().distance(&exact);
        assert!(e_eul > 0.3, "euler tip error {e_eul}");
        assert!(e_mid < 0.01, "midpoint tip error {e_mid}");
    }

    #[test]
    fn insufficient_samples() {
        let c = CurvatureProfile::new(vec![1.0], vec![0.0]).unwrap();
        assert!(matches!(
            integrate_shape(&c, Pose::default(), Scheme::Midpoint),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn strains_below_threshold_are_straight() {
        let p = StrainProfile::new(vec![1.0, 2.0, 3.0], vec![5.0, -9.0, 10.0]).unwrap();
        let c = strains_to_curvatures(&PowerLawModel::reference(), &p, 10.0, BendSign::Positive)
            .unwrap();
        assert!(c.curvatures.iter().all(|&k| k == 0.0));
        assert_eq!(c.positions, p.positions());
    }

    #[test]
    fn constant_strain_maps_to_reference_radius() {
        let p = StrainProfile::new(vec![1.3, 2.6, 3.9], vec![1440.649; 3]).unwrap();
        let c = strains_to_curvatures(&PowerLawModel::reference(), &p, 0.0, BendSign::Positive)
            .unwrap();
        for k in &c.curvatures {
            assert!((1.0 / k - 101.3517).abs() < 1e-2);
        }
        assert!((c.per_metre()[0] - 9.867).abs() < 1e-2);
        let neg = strains_to_curvatures(&PowerLawModel::reference(), &p, 0.0, BendSign::Negative)
            .unwrap();
        assert_eq!(neg.curvatures[0], -c.curvatures[0]);
    }

    #[test]
    fn step_profile_gives_straight_then_bend() {
        let pos = uniform_grid(150.0, 1.3);
        let eps: Vec<f64> = pos
            .iter()
            .map(|&s| if s < 50.0 { 0.0 } else { 1460.0 })
            .collect();
        let p = StrainProfile::new(pos, eps).unwrap();
        let c = strains_to_curvatures(&PowerLawModel::reference(), &p, 30.0, BendSign::Positive)
            .unwrap();
        for (s, k) in c.positions.iter().zip(&c.curvatures) {
            if *s < 50.0 {
                assert_eq!(*k, 0.0);
            } else {
                assert!((1.0 / k - 100.0).abs() < 0.05, "{}", 1.0 / k);
            }
        }
    }

    #[test]
    fn scheme_parses() {
        assert_eq!("euler".parse::<Scheme>().unwrap(), Scheme::Euler);
        assert!("rk4".parse::<Scheme>().is_err());
    }

    #[test]
    fn shape_interpolation() {
        let c = CurvatureProfile::constant(0.0, 10.0, 1.0);
        let shape = integrate_shape(&c, Pose::new(1.0, 2.0, 0.0), Scheme::Midpoint).unwrap();
        let p = shape.point_at(4.5);
        assert!((p.x - 5.5).abs() < 1e-12 && (p.y - 2.0).abs() < 1e-12);
        assert_eq!(shape.point_at(50.0), shape.tip());
    }
}
