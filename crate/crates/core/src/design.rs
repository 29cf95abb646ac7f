//! Composite-beam model of the fiber-on-flat-wire sensor assembly.
//!
//! The cross-section is a rectangular wire lying on its wide face with a
//! round fiber bonded centered on top of it. Heights are measured from the
//! bottom face of the wire, so the wire centroid sits at `height / 2` and the
//! fiber centroid at `height + radius`. Moduli are in GPa; only their ratio
//! enters the neutral-plane computation.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Optical fiber cross-section and strain limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    pub radius_mm: f64,
    pub modulus_gpa: f64,
    /// Maximum allowable strain as a fraction (0.01 = 1 %).
    pub max_strain: f64,
}

impl FiberSpec {
    /// Single-mode sensing fiber used on the reference assembly.
    pub const HD65: FiberSpec = FiberSpec {
        radius_mm: 0.0775,
        modulus_gpa: 4.81,
        max_strain: 0.01,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.radius_mm > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "fiber radius must be > 0 mm, got {}",
                self.radius_mm
            )));
        }
        if !(self.modulus_gpa > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "fiber modulus must be > 0 GPa, got {}",
                self.modulus_gpa
            )));
        }
        if !(self.max_strain > 0.0 && self.max_strain < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "fiber max strain must lie in (0, 1), got {}",
                self.max_strain
            )));
        }
        Ok(())
    }

    pub fn area_mm2(&self) -> f64 {
        PI * self.radius_mm * self.radius_mm
    }
}

impl Default for FiberSpec {
    fn default() -> Self {
        Self::HD65
    }
}

/// Flat wire cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireSpec {
    pub width_mm: f64,
    pub height_mm: f64,
    pub modulus_gpa: f64,
}

impl WireSpec {
    /// 0.813 mm x 0.152 mm superelastic NiTi flat wire.
    pub const NITI_FLAT: WireSpec = WireSpec {
        width_mm: 0.813,
        height_mm: 0.152,
        modulus_gpa: 75.0,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.width_mm > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "wire width must be > 0 mm, got {}",
                self.width_mm
            )));
        }
        if !(self.height_mm >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "wire height must be >= 0 mm, got {}",
                self.height_mm
            )));
        }
        if !(self.modulus_gpa > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "wire modulus must be > 0 GPa, got {}",
                self.modulus_gpa
            )));
        }
        Ok(())
    }

    pub fn area_mm2(&self) -> f64 {
        self.width_mm * self.height_mm
    }
}

impl Default for WireSpec {
    fn default() -> Self {
        Self::NITI_FLAT
    }
}

/// Rectangular channel the assembly must slide into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub width_mm: f64,
    pub height_mm: f64,
}

impl Default for Channel {
    fn default() -> Self {
        Channel {
            width_mm: 1.2,
            height_mm: 0.6,
        }
    }
}

impl Channel {
    pub fn fits(&self, wire: &WireSpec, fiber: &FiberSpec) -> bool {
        wire.width_mm <= self.width_mm && wire.height_mm + 2.0 * fiber.radius_mm <= self.height_mm
    }
}

/// Fully derived cross-section of an assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsaGeometry {
    pub fiber: FiberSpec,
    pub wire: WireSpec,
    /// Neutral plane height above the wire bottom face (mm).
    pub neutral_plane_mm: f64,
    /// Fiber centroid distance above the neutral plane (mm).
    pub bias_mm: f64,
    /// Tightest bend radius the assembly tolerates (mm).
    pub min_bend_radius_mm: f64,
}

impl SsaGeometry {
    pub fn new(fiber: FiberSpec, wire: WireSpec) -> Result<Self> {
        let neutral_plane_mm = neutral_plane(&wire, &fiber)?;
        let bias_mm = fiber_centroid(&wire, &fiber) - neutral_plane_mm;
        let min_bend_radius_mm = min_bend_radius(&fiber, bias_mm.max(0.0))?;
        Ok(SsaGeometry {
            fiber,
            wire,
            neutral_plane_mm,
            bias_mm,
            min_bend_radius_mm,
        })
    }

    pub fn fiber_centroid_mm(&self) -> f64 {
        fiber_centroid(&self.wire, &self.fiber)
    }

    /// Curvature (1/mm) beyond which the assembly is outside its strain limit.
    pub fn max_curvature_per_mm(&self) -> f64 {
        1.0 / self.min_bend_radius_mm
    }
}

fn fiber_centroid(wire: &WireSpec, fiber: &FiberSpec) -> f64 {
    wire.height_mm + fiber.radius_mm
}

/// Transformed-area neutral plane of the wire + fiber section, in mm above the
/// wire bottom face. Areas are weighted by `E_j / E_fiber`.
pub fn neutral_plane(wire: &WireSpec, fiber: &FiberSpec) -> Result<f64> {
    wire.validate()?;
    fiber.validate()?;

    let n_wire = wire.modulus_gpa / fiber.modulus_gpa;
    let parts = [
        (n_wire * wire.area_mm2(), wire.height_mm / 2.0),
        (fiber.area_mm2(), fiber_centroid(wire, fiber)),
    ];
    let weight: f64 = parts.iter().map(|(na, _)| na).sum();
    if !(weight > 0.0) {
        return Err(Error::InvalidSpec("total transformed area is zero".into()));
    }
    let moment: f64 = parts.iter().map(|(na, y)| na * y).sum();
    Ok(moment / weight)
}

/// Lever arm between the fiber centroid and the neutral plane.
pub fn sensor_bias(geometry: &SsaGeometry) -> f64 {
    geometry.fiber_centroid_mm() - geometry.neutral_plane_mm
}

/// Smallest bend radius before the fiber exceeds its strain limit.
///
/// The bare-fiber limit is `r_f / eps_max`; once the fiber sits further than
/// `r_f` from the neutral plane the centroid strain `bias * kappa` governs.
pub fn min_bend_radius(fiber: &FiberSpec, bias_mm: f64) -> Result<f64> {
    if !(fiber.max_strain > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "max strain must be > 0, got {}",
            fiber.max_strain
        )));
    }
    if bias_mm < 0.0 {
        return Err(Error::InvalidSpec(format!(
            "bias must be >= 0 mm, got {bias_mm}"
        )));
    }
    Ok(fiber.radius_mm.max(bias_mm) / fiber.max_strain)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignCandidate {
    pub wire: WireSpec,
    pub bias_mm: f64,
    pub min_bend_radius_mm: f64,
    pub fits_channel: bool,
}

/// Grid over candidate wire sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSpace {
    pub width_mm: (f64, f64),
    pub height_mm: (f64, f64),
    pub step_mm: f64,
    pub wire_modulus_gpa: f64,
    pub channel: Channel,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            width_mm: (0.5, 1.0),
            height_mm: (0.0, 0.5),
            step_mm: 0.001,
            wire_modulus_gpa: WireSpec::NITI_FLAT.modulus_gpa,
            channel: Channel::default(),
        }
    }
}

/// Inclusive grid `lo, lo + step, ..., <= hi`, rounded to 1e-12 mm so that
/// grid values compare equal to their decimal spelling.
fn grid(range: (f64, f64), step: f64) -> Vec<f64> {
    let (lo, hi) = range;
    if hi < lo {
        return Vec::new();
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .collect()
}

/// Sweep wire sizes and rank them by sensor bias (largest first).
///
/// Ties are broken by smaller wire area, then smaller width, so the order is
/// fully determined by the inputs.
pub fn design_search(fiber: &FiberSpec, space: &SearchSpace) -> Result<Vec<DesignCandidate>> {
    fiber.validate()?;
    if !(space.step_mm > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "search step must be > 0 mm, got {}",
            space.step_mm
        )));
    }

    let widths = grid(space.width_mm, space.step_mm);
    let heights = grid(space.height_mm, space.step_mm);
    let mut out = Vec::with_capacity(widths.len() * heights.len());
    for &width_mm in &widths {
        for &height_mm in &heights {
            let wire = WireSpec {
                width_mm,
                height_mm,
                modulus_gpa: space.wire_modulus_gpa,
            };
            let geometry = SsaGeometry::new(*fiber, wire)?;
            out.push(DesignCandidate {
                wire,
                bias_mm: geometry.bias_mm,
                min_bend_radius_mm: geometry.min_bend_radius_mm,
                fits_channel: space.channel.fits(&wire, fiber),
            });
        }
    }

    out.sort_by(|a, b| {
        b.bias_mm
            .total_cmp(&a.bias_mm)
            .then_with(|| a.wire.area_mm2().total_cmp(&b.wire.area_mm2()))
            .then_with(|| a.wire.width_mm.total_cmp(&b.wire.width_mm))
            .then_with(|| a.wire.height_mm.total_cmp(&b.wire.height_mm))
            .then(Ordering::Equal)
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn symmetric_equal_moduli_gives_symmetry_plane() {
        // Wire height 2r with the same modulus is not mirror-symmetric with a
        // round fiber, so build the symmetric case from the centroid formula:
        // equal transformed areas put the plane halfway between centroids.
        let fiber = FiberSpec {
            radius_mm: 0.1,
            modulus_gpa: 10.0,
            max_strain: 0.01,
        };
        let width = fiber.area_mm2() / 0.2;
        let wire = WireSpec {
            width_mm: width,
            height_mm: 0.2,
            modulus_gpa: 10.0,
        };
        // centroids at 0.1 and 0.3, equal areas -> 0.2, the wire/fiber interface
        assert_close(neutral_plane(&wire, &fiber).unwrap(), 0.2, 1e-12);
    }

    #[test]
    fn zero_height_wire_collapses_to_fiber_centroid() {
        let wire = WireSpec {
            height_mm: 0.0,
            ..WireSpec::NITI_FLAT
        };
        let y = neutral_plane(&wire, &FiberSpec::HD65).unwrap();
        assert_close(y, 0.0775, 1e-15);
        let g = SsaGeometry::new(FiberSpec::HD65, wire).unwrap();
        assert_close(g.bias_mm, 0.0, 1e-15);
    }

    #[test]
    fn reference_wire_geometry() {
        // Hand evaluation: n_w = 75/4.81, n_w*A_w = 1.926880, A_f = 0.0188692
        // Y = (1.926880*0.076 + 0.0188692*0.2295) / 1.945749 = 0.0774886
        let g = SsaGeometry::new(FiberSpec::HD65, WireSpec::NITI_FLAT).unwrap();
        assert_close(g.neutral_plane_mm, 0.0774886, 1e-6);
        assert_close(g.bias_mm, 0.1520114, 1e-6);
        assert_close(sensor_bias(&g), g.bias_mm, 0.0);
        assert_close(g.min_bend_radius_mm, 15.20114, 1e-4);
    }

    #[test]
    fn bias_zero_when_fiber_on_neutral_plane() {
        let mut g = SsaGeometry::new(FiberSpec::HD65, WireSpec::NITI_FLAT).unwrap();
        g.neutral_plane_mm = g.fiber_centroid_mm();
        assert_eq!(sensor_bias(&g), 0.0);
    }

    #[test]
    fn bend_radius_limits() {
        let f = FiberSpec::HD65;
        assert_close(min_bend_radius(&f, 0.0).unwrap(), 7.75, 1e-12);
        assert_close(min_bend_radius(&f, 0.152).unwrap(), 15.2, 1e-12);
        let bad = FiberSpec {
            max_strain: 0.0,
            ..f
        };
        assert!(matches!(
            min_bend_radius(&bad, 0.1),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn invalid_specs_rejected() {
        let bad_wire = WireSpec {
            width_mm: 0.0,
            ..WireSpec::NITI_FLAT
        };
        assert!(neutral_plane(&bad_wire, &FiberSpec::HD65).is_err());
        let bad_fiber = FiberSpec {
            modulus_gpa: -1.0,
            ..FiberSpec::HD65
        };
        assert!(neutral_plane(&WireSpec::NITI_FLAT, &bad_fiber).is_err());
    }

    #[test]
    fn single_point_search_matches_direct_geometry() {
        let space = SearchSpace {
            width_mm: (0.813, 0.813),
            height_mm: (0.152, 0.152),
            ..SearchSpace::default()
        };
        let c = design_search(&FiberSpec::HD65, &space).unwrap();
        assert_eq!(c.len(), 1);
        let g = SsaGeometry::new(FiberSpec::HD65, WireSpec::NITI_FLAT).unwrap();
        assert_close(c[0].bias_mm, g.bias_mm, 1e-15);
        assert!(c[0].fits_channel);
    }

    #[test]
    fn degenerate_height_range_has_zero_bias() {
        let space = SearchSpace {
            height_mm: (0.0, 0.0),
            step_mm: 0.01,
            ..SearchSpace::default()
        };
        let c = design_search(&FiberSpec::HD65, &space).unwrap();
        assert_eq!(c.len(), 51);
        assert!(c.iter().all(|c| c.bias_mm.abs() < 1e-15));
    }

    #[test]
    fn empty_range_is_empty_list() {
        let space = SearchSpace {
            width_mm: (1.0, 0.5),
            ..SearchSpace::default()
        };
        assert!(design_search(&FiberSpec::HD65, &space).unwrap().is_empty());
    }

    #[test]
    fn bias_monotone_in_height_across_sweep() {
        let fiber = FiberSpec::HD65;
        for width in grid((0.5, 1.0), 0.05) {
            let mut last = -1.0;
            for height in grid((0.0, 0.5), 0.001) {
                let wire = WireSpec {
                    width_mm: width,
                    height_mm: height,
                    modulus_gpa: 75.0,
                };
                let b = SsaGeometry::new(fiber, wire).unwrap().bias_mm;
                assert!(b >= last, "width {width} height {height}: {b} < {last}");
                last = b;
            }
        }
    }

    #[test]
    fn channel_feasibility() {
        let ch = Channel::default();
        assert!(ch.fits(&WireSpec::NITI_FLAT, &FiberSpec::HD65));
        let tall = WireSpec {
            height_mm: 0.5,
            ..WireSpec::NITI_FLAT
        };
        assert!(!ch.fits(&tall, &FiberSpec::HD65));
    }
}
