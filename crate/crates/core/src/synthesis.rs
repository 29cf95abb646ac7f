//! Synthetic interrogator.
//!
//! A fiber offset `bias` from the neutral plane of a beam bent to curvature
//! `kappa` sees axial strain `bias * kappa`. Each sample reports the mean
//! strain over its gauge segment, plus optional white gaussian noise.
//! Noise for frame `k` comes from ChaCha stream `k` of the seed, so frames
//! are reproducible on their own and can be dropped independently.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::calibration::CalibrationSlot;
use crate::error::{Error, Result};
use crate::metrics::GroundTruth;
use crate::reconstruction::{uniform_grid, ProfileMeta, StrainProfile};

pub const DEFAULT_RESOLUTION_MM: f64 = 1.3;
pub const DEFAULT_FRAME_RATE_HZ: f64 = 62.5;

/// Named lever-arm presets (mm).
pub mod bias_presets {
    /// Mean of the strain x radius products of the C-shape trials.
    pub const EFFECTIVE_MM: f64 = 0.1464;
    /// Transformed-area composite-beam value for the 0.813 x 0.152 mm wire.
    pub const COMPOSITE_BEAM_MM: f64 = 0.152;
    /// Value reported alongside the original wire selection. It is not
    /// reproduced by the composite-beam model; kept for comparison only.
    pub const REPORTED_MM: f64 = 0.079;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorModel {
    pub bias_mm: f64,
    pub spatial_resolution_mm: f64,
    pub noise_sigma_ue: f64,
    pub seed: u64,
}

impl Default for SensorModel {
    fn default() -> Self {
        SensorModel {
            bias_mm: bias_presets::EFFECTIVE_MM,
            spatial_resolution_mm: DEFAULT_RESOLUTION_MM,
            noise_sigma_ue: 0.0,
            seed: 0,
        }
    }
}

impl SensorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.bias_mm > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "sensor bias must be > 0 mm, got {}",
                self.bias_mm
            )));
        }
        if !(self.spatial_resolution_mm > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "spatial resolution must be > 0 mm, got {}",
                self.spatial_resolution_mm
            )));
        }
        if !(self.noise_sigma_ue >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "noise sigma must be >= 0 ue, got {}",
                self.noise_sigma_ue
            )));
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn add_noise(&self, strains: &mut [f64], stream: u64) {
        if self.noise_sigma_ue == 0.0 {
            return;
        }
        let normal = Normal::new(0.0, self.noise_sigma_ue).expect("validated sigma");
        let mut rng = self.rng(stream);
        for e in strains {
            *e += normal.sample(&mut rng);
        }
    }
}

fn truth_strains(truth: &GroundTruth, sensor: &SensorModel, positions: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    positions
        .iter()
        .map(|&s| {
            let kappa = truth.mean_curvature(prev, s);
            prev = s;
            sensor.bias_mm * kappa * 1e6
        })
        .collect()
}

fn profile_for(truth: &GroundTruth, sensor: &SensorModel, stream: u64) -> Result<StrainProfile> {
    sensor.validate()?;
    let positions = uniform_grid(truth.total_length_mm, sensor.spatial_resolution_mm);
    let mut strains = truth_strains(truth, sensor, &positions);
    sensor.add_noise(&mut strains, stream);
    StrainProfile::new(positions, strains)
}

/// Strain trace (ue) the sensor would report lying in `truth`.
pub fn strain_from_truth(truth: &GroundTruth, sensor: &SensorModel) -> Result<StrainProfile> {
    profile_for(truth, sensor, 0)
}

/// Jig layout for synthetic calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationJig {
    /// Slot radii (mm); 0 is the straight slot.
    pub radii_mm: Vec<f64>,
    /// Sensor length lying in each slot (mm).
    pub slot_length_mm: f64,
}

impl Default for CalibrationJig {
    fn default() -> Self {
        CalibrationJig {
            radii_mm: crate::calibration::DEFAULT_JIG_RADII_MM.to_vec(),
            slot_length_mm: 100.0,
        }
    }
}

/// Constant-curvature traces for every slot and trial, each with its own noise draw.
pub fn synth_calibration_dataset(
    jig: &CalibrationJig,
    sensor: &SensorModel,
    trials: usize,
) -> Result<Vec<CalibrationSlot>> {
    sensor.validate()?;
    if !(jig.slot_length_mm > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "slot length must be > 0 mm, got {}",
            jig.slot_length_mm
        )));
    }
    let positions = uniform_grid(jig.slot_length_mm, sensor.spatial_resolution_mm);
    let mut stream = 0u64;
    jig.radii_mm
        .iter()
        .map(|&radius_mm| {
            if radius_mm < 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "jig radius must be >= 0 mm, got {radius_mm}"
                )));
            }
            let clean = if radius_mm == 0.0 {
                0.0
            } else {
                sensor.bias_mm / radius_mm * 1e6
            };
            let trials = (0..trials)
                .map(|_| {
                    let mut strains = vec![clean; positions.len()];
                    sensor.add_noise(&mut strains, stream);
                    stream += 1;
                    StrainProfile::new(positions.clone(), strains)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CalibrationSlot { radius_mm, trials })
        })
        .collect()
}

/// Timed sequence of independent strain frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameStream {
    pub frame_rate_hz: f64,
    pub frames: Vec<StrainProfile>,
}

impl FrameStream {
    pub fn timestamps(&self) -> Vec<f64> {
        self.frames
            .iter()
            .map(|f| f.meta.timestamp_s.unwrap_or(f64::NAN))
            .collect()
    }
}

/// One frame per pose at `rate_hz`; frame `k` is stamped `k / rate_hz` seconds.
pub fn stream_frames(
    truth_sequence: &[GroundTruth],
    sensor: &SensorModel,
    rate_hz: f64,
) -> Result<FrameStream> {
    if !(rate_hz > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "frame rate must be > 0 Hz, got {rate_hz}"
        )));
    }
    let frames = truth_sequence
        .iter()
        .enumerate()
        .map(|(k, truth)| {
            let meta = ProfileMeta {
                rate_hz: Some(rate_hz),
                sensor_id: Some("synthetic".to_string()),
                timestamp_s: Some(k as f64 / rate_hz),
            };
            Ok(profile_for(truth, sensor, k as u64)?.with_meta(meta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameStream {
        frame_rate_hz: rate_hz,
        frames,
    })
}
