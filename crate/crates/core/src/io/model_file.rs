//! Calibration model files and calibration manifests (both TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calibration::{Calibration, CalibrationSlot, PowerLawModel, ResidualStats};
use crate::error::{Error, Result};
use crate::io::tables::{read_strain_csv, read_text, write_text};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitDomain {
    pub min_ue: f64,
    pub max_ue: f64,
}

/// On-disk form of a fitted calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    /// `a` in `radius_mm = a * strain_ue^b`.
    pub coefficient: f64,
    /// `b` in `radius_mm = a * strain_ue^b`.
    pub exponent: f64,
    #[serde(default)]
    pub straight_threshold_ue: f64,
    pub fit_domain: FitDomain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualStats>,
}

impl ModelFile {
    pub fn model(&self) -> PowerLawModel {
        PowerLawModel {
            coefficient: self.coefficient,
            exponent: self.exponent,
            fit_domain_ue: (self.fit_domain.min_ue, self.fit_domain.max_ue),
        }
    }

    pub fn from_model(model: &PowerLawModel, straight_threshold_ue: f64) -> Self {
        ModelFile {
            coefficient: model.coefficient,
            exponent: model.exponent,
            straight_threshold_ue,
            fit_domain: FitDomain {
                min_ue: model.fit_domain_ue.0,
                max_ue: model.fit_domain_ue.1,
            },
            residuals: None,
        }
    }

    pub fn from_calibration(cal: &Calibration) -> Self {
        ModelFile {
            residuals: Some(cal.residuals),
            ..Self::from_model(&cal.model, cal.straight_threshold_ue)
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model file serializes")
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let file: ModelFile = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.message().to_string(),
        })?;
        file.model().validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, &path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_toml())
    }
}

/// One slot entry of a calibration manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotEntry {
    /// 0 for the straight slot.
    pub radius_mm: f64,
    /// Strain CSV per trial, relative to the manifest.
    pub files: Vec<PathBuf>,
    /// In-slot arc-length window `[from, to]` in mm; whole trace when absent.
    #[serde(default)]
    pub window_mm: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationManifest {
    pub slot: Vec<SlotEntry>,
}

impl CalibrationManifest {
    pub fn load(path: &Path) -> Result<(Self, Vec<PathBuf>)> {
        let text = read_text(path)?;
        let manifest: CalibrationManifest = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.message().to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let files = manifest
            .slot
            .iter()
            .flat_map(|s| s.files.iter().map(|f| base.join(f)))
            .collect();
        Ok((manifest, files))
    }

    /// Read every trial and cut it to its slot window.
    pub fn load_slots(&self, base: &Path) -> Result<Vec<CalibrationSlot>> {
        self.slot
            .iter()
            .map(|entry| {
                let trials = entry
                    .files
                    .iter()
                    .map(|f| {
                        let profile = read_strain_csv(&base.join(f))?;
                        match entry.window_mm {
                            Some([from, to]) => profile.window(from, to),
                            None => Ok(profile),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(CalibrationSlot {
                    radius_mm: entry.radius_mm,
                    trials,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_file_round_trip() {
        let f = ModelFile::from_model(&PowerLawModel::reference(), 12.5);
        let back = ModelFile::parse(&f.to_toml(), "mem").unwrap();
        assert_eq!(back, f);
        assert_eq!(back.model(), PowerLawModel::reference());
    }

    #[test]
    fn unbounded_domain_survives() {
        let f = ModelFile::from_model(&PowerLawModel::from_bias(0.1464), 0.0);
        let back = ModelFile::parse(&f.to_toml(), "mem").unwrap();
        assert_eq!(back.fit_domain.max_ue, f64::INFINITY);
    }

    #[test]
    fn rejects_invalid_models() {
        let text = "coefficient = 10.0\nexponent = 0.5\n[fit_domain]\nmin_ue = 1.0\nmax_ue = 2.0\n";
        assert!(ModelFile::parse(text, "mem").is_err());
        let text = "coefficient = 10.0\nexponent = -1.0\ncolour = 1\n[fit_domain]\nmin_ue = 1.0\nmax_ue = 2.0\n";
        assert!(ModelFile::parse(text, "mem").is_err());
    }
}
