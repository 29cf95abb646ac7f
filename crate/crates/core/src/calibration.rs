//! Strain-to-bend-radius calibration.
//!
//! The assembly is laid in constant-curvature jig slots; the mean strain of
//! each slot is paired with the slot radius and a power law
//! `radius_mm = a * strain_ue^b` is fit by ordinary least squares in log-log
//! space. The straight slot (radius 0) never enters the fit; its scatter sets
//! the noise floor below which strain is read as "straight".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconstruction::StrainProfile;

/// Default calibration jig radii in mm; 0 is the straight slot.
pub const DEFAULT_JIG_RADII_MM: [f64; 10] =
    [0.0, 100.0, 95.0, 90.0, 85.0, 80.0, 75.0, 70.0, 65.0, 60.0];

/// Multiple of the straight-slot standard deviation used as the noise floor.
pub const STRAIGHT_THRESHOLD_SIGMAS: f64 = 3.0;

/// One jig slot with its repeated trials, already cut to the in-slot window.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSlot {
    /// Slot radius in mm; 0 encodes the straight slot.
    pub radius_mm: f64,
    pub trials: Vec<StrainProfile>,
}

impl CalibrationSlot {
    pub fn is_straight(&self) -> bool {
        self.radius_mm == 0.0
    }

    fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        self.trials.iter().flat_map(|t| t.strains().iter().copied())
    }
}

/// Mean strain (ue) over every sample of every trial in the slot.
pub fn slot_average_strain(slot: &CalibrationSlot) -> Result<f64> {
    let (sum, n) = slot
        .samples()
        .fold((0.0, 0usize), |(sum, n), e| (sum + e, n + 1));
    if n == 0 {
        return Err(Error::InsufficientData(format!(
            "calibration slot {} mm has no trial samples",
            slot.radius_mm
        )));
    }
    Ok(sum / n as f64)
}

/// A value computed from the model together with whether the input strain
/// was inside the range the model was fit on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub in_domain: bool,
}

/// `radius_mm = coefficient * strain_ue ^ exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawModel {
    pub coefficient: f64,
    pub exponent: f64,
    /// Strain range (ue) spanned by the fit points.
    pub fit_domain_ue: (f64, f64),
}

impl PowerLawModel {
    /// Calibration reported for the flat-wire reference assembly. Its fit
    /// domain is taken as the strains of the 100 mm and 60 mm jig slots.
    pub fn reference() -> Self {
        let mut m = PowerLawModel {
            coefficient: 126099.3715,
            exponent: -0.97984,
            fit_domain_ue: (0.0, f64::INFINITY),
        };
        let lo = m.radius_to_strain(100.0).expect("positive radius");
        let hi = m.radius_to_strain(60.0).expect("positive radius");
        m.fit_domain_ue = (lo, hi);
        m
    }

    /// Linear strain law `strain = bias * curvature`, i.e. exponent -1.
    pub fn from_bias(bias_mm: f64) -> Self {
        PowerLawModel {
            coefficient: bias_mm * 1e6,
            exponent: -1.0,
            fit_domain_ue: (0.0, f64::INFINITY),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coefficient > 0.0 && self.coefficient.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "power-law coefficient must be > 0, got {}",
                self.coefficient
            )));
        }
        if !(self.exponent < 0.0 && self.exponent.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "power-law exponent must be < 0, got {}",
                self.exponent
            )));
        }
        Ok(())
    }

    pub fn in_domain(&self, strain_ue: f64) -> bool {
        strain_ue >= self.fit_domain_ue.0 && strain_ue <= self.fit_domain_ue.1
    }

    /// Bend radius (mm) for a strain magnitude (ue).
    pub fn strain_to_radius(&self, strain_ue: f64) -> Result<Evaluated> {
        if !(strain_ue > 0.0) {
            return Err(Error::Domain(format!(
                "strain must be > 0 ue to map to a radius, got {strain_ue}"
            )));
        }
        Ok(Evaluated {
            value: self.coefficient * strain_ue.powf(self.exponent),
            in_domain: self.in_domain(strain_ue),
        })
    }

    /// Exact inverse of [`strain_to_radius`](Self::strain_to_radius).
    pub fn radius_to_strain(&self, radius_mm: f64) -> Result<f64> {
        if !(radius_mm > 0.0) {
            return Err(Error::Domain(format!(
                "radius must be > 0 mm, got {radius_mm}"
            )));
        }
        Ok((radius_mm / self.coefficient).powf(1.0 / self.exponent))
    }

    /// Residuals of `ln(radius)` against the model.
    pub fn log_residuals(&self, points: &[(f64, f64)]) -> ResidualStats {
        let r: Vec<f64> = points
            .iter()
            .map(|&(e, rho)| rho.ln() - (self.coefficient.ln() + self.exponent * e.ln()))
            .collect();
        let n = r.len().max(1) as f64;
        ResidualStats {
            points: r.len(),
            rms_ln: (r.iter().map(|x| x * x).sum::<f64>() / n).sqrt(),
            max_abs_ln: r.iter().fold(0.0, |m: f64, x| m.max(x.abs())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub points: usize,
    pub rms_ln: f64,
    pub max_abs_ln: f64,
}

/// Ordinary least squares of `ln rho = ln a + b ln eps` over `(strain_ue, radius_mm)` points.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawModel> {
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs at least 2 curved points, got {}",
            points.len()
        )));
    }
    if let Some((index, &(strain_ue, radius_mm))) = points
        .iter()
        .enumerate()
        .find(|(_, (e, r))| !(*e > 0.0 && *r > 0.0 && e.is_finite() && r.is_finite()))
    {
        return Err(Error::InvalidPoint {
            index,
            strain_ue,
            radius_mm,
        });
    }

    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (sxy, sxx) = xs.iter().zip(&ys).fold((0.0, 0.0), |(sxy, sxx), (x, y)| {
        let dx = x - x_mean;
        (sxy + dx * (y - y_mean), sxx + dx * dx)
    });
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "power-law fit needs at least 2 distinct strains".into(),
        ));
    }
    let exponent = sxy / sxx;
    let coefficient = (y_mean - exponent * x_mean).exp();

    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(PowerLawModel {
        coefficient,
        exponent,
        fit_domain_ue: (lo, hi),
    })
}

/// Result of calibrating against a full jig dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub model: PowerLawModel,
    /// Strain magnitude (ue) at or below which a sample is treated as straight.
    pub straight_threshold_ue: f64,
    pub residuals: ResidualStats,
    /// `(mean strain ue, slot radius mm)` pairs that entered the fit.
    pub points: Vec<(f64, f64)>,
}

/// Fit the model from jig slots and derive the straight-strain threshold.
///
/// Curved slots contribute their absolute mean strain. The threshold is
/// [`STRAIGHT_THRESHOLD_SIGMAS`] times the population standard deviation of the
/// straight-slot samples, or 0 when no straight slot was recorded.
pub fn calibrate(slots: &[CalibrationSlot]) -> Result<Calibration> {
    let mut points = Vec::new();
    let mut straight = Vec::new();
    for slot in slots {
        if slot.radius_mm < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "slot radius must be >= 0 mm, got {}",
                slot.radius_mm
            )));
        }
        if slot.trials.iter().any(|t| t.is_empty()) || slot.trials.is_empty() {
            return Err(Error::InsufficientData(format!(
                "slot {} mm has an empty trial list or trial",
                slot.radius_mm
            )));
        }
        if slot.is_straight() {
            straight.extend(slot.samples());
        } else {
            points.push((slot_average_strain(slot)?.abs(), slot.radius_mm));
        }
    }

    let model = fit_power_law(&points)?;
    let straight_threshold_ue = if straight.is_empty() {
        0.0
    } else {
        let n = straight.len() as f64;
        let mean = straight.iter().sum::<f64>() / n;
        let var = straight.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
        STRAIGHT_THRESHOLD_SIGMAS * var.sqrt()
    };
    Ok(Calibration {
        residuals: model.log_residuals(&points),
        model,
        straight_threshold_ue,
        points,
    })
}
