//! Toolkit configuration.
//!
//! One TOML file drives every subcommand. Numeric keys carry their unit in
//! the name (`_mm`, `_ue`, `_gpa`, `_hz`); unknown keys are rejected. An empty
//! file yields the reference assembly and interrogator settings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::design::{Channel, FiberSpec, SearchSpace, WireSpec};
use crate::error::{Error, Result};
use crate::io::tables::read_text;
use crate::metrics::{TruthKind, J_STRAIGHT_MM};
use crate::reconstruction::{BendSign, Scheme};
use crate::synthesis::{
    bias_presets, CalibrationJig, SensorModel, DEFAULT_FRAME_RATE_HZ, DEFAULT_RESOLUTION_MM,
};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "OFDR_SHAPE_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiberBlock {
    pub radius_mm: f64,
    pub modulus_gpa: f64,
    pub max_strain: f64,
}

impl Default for FiberBlock {
    fn default() -> Self {
        let f = FiberSpec::HD65;
        FiberBlock {
            radius_mm: f.radius_mm,
            modulus_gpa: f.modulus_gpa,
            max_strain: f.max_strain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WireBlock {
    pub width_mm: f64,
    pub height_mm: f64,
    pub modulus_gpa: f64,
}

impl Default for WireBlock {
    fn default() -> Self {
        let w = WireSpec::NITI_FLAT;
        WireBlock {
            width_mm: w.width_mm,
            height_mm: w.height_mm,
            modulus_gpa: w.modulus_gpa,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelBlock {
    pub width_mm: f64,
    pub height_mm: f64,
}

impl Default for ChannelBlock {
    fn default() -> Self {
        let c = Channel::default();
        ChannelBlock {
            width_mm: c.width_mm,
            height_mm: c.height_mm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignBlock {
    pub width_min_mm: f64,
    pub width_max_mm: f64,
    pub height_min_mm: f64,
    pub height_max_mm: f64,
    pub step_mm: f64,
}

impl Default for DesignBlock {
    fn default() -> Self {
        let s = SearchSpace::default();
        DesignBlock {
            width_min_mm: s.width_mm.0,
            width_max_mm: s.width_mm.1,
            height_min_mm: s.height_mm.0,
            height_max_mm: s.height_mm.1,
            step_mm: s.step_mm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorBlock {
    pub bias_mm: f64,
    pub resolution_mm: f64,
    pub noise_ue: f64,
    pub seed: u64,
    pub rate_hz: f64,
}

impl Default for SensorBlock {
    fn default() -> Self {
        SensorBlock {
            bias_mm: bias_presets::EFFECTIVE_MM,
            resolution_mm: DEFAULT_RESOLUTION_MM,
            noise_ue: 0.0,
            seed: 0,
            rate_hz: DEFAULT_FRAME_RATE_HZ,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JigBlock {
    pub radii_mm: Vec<f64>,
    pub slot_length_mm: f64,
    pub trials: usize,
}

impl Default for JigBlock {
    fn default() -> Self {
        let jig = CalibrationJig::default();
        JigBlock {
            radii_mm: jig.radii_mm,
            slot_length_mm: jig.slot_length_mm,
            trials: 3,
        }
    }
}

/// Where the strain-to-radius model comes from. Exactly one source is used,
/// in the order model file, manifest, synthetic jig.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    pub synthesize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructionBlock {
    pub scheme: Scheme,
    pub sign: i64,
    /// Overrides the calibration's straight threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_ue: Option<f64>,
    /// Resample strain to this spacing before reconstructing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing_mm: Option<f64>,
}

impl Default for ReconstructionBlock {
    fn default() -> Self {
        ReconstructionBlock {
            scheme: Scheme::Midpoint,
            sign: 1,
            threshold_ue: None,
            spacing_mm: None,
        }
    }
}

impl ReconstructionBlock {
    pub fn bend_sign(&self) -> BendSign {
        BendSign::from_i64(self.sign).unwrap_or_default()
    }
}

/// One experiment in the `[[trial]]` list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialBlock {
    pub name: String,
    pub kind: TruthKind,
    #[serde(default)]
    pub radius_mm: f64,
    /// Sensor span inside the jig; 170 mm for C, 150 mm for J by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_mm: Option<f64>,
    #[serde(default = "default_straight")]
    pub straight_mm: f64,
    /// Measured strain; synthesized from the truth when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strain_csv: Option<PathBuf>,
    /// Shape CSV used as truth for `custom` trials.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_csv: Option<PathBuf>,
}

fn default_straight() -> f64 {
    J_STRAIGHT_MM
}

impl TrialBlock {
    pub fn span(&self) -> f64 {
        self.span_mm.unwrap_or(match self.kind {
            TruthKind::JShape => 150.0,
            _ => 170.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: PathBuf,
    pub svg: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: PathBuf::from("out"),
            svg: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToolkitConfig {
    pub fiber: FiberBlock,
    pub wire: WireBlock,
    pub channel: ChannelBlock,
    pub design: DesignBlock,
    pub sensor: SensorBlock,
    pub jig: JigBlock,
    pub calibration: CalibrationBlock,
    pub reconstruction: ReconstructionBlock,
    pub output: OutputBlock,
    pub trial: Vec<TrialBlock>,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn positive(key: &str, value: f64, unit: &str) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::config(
            key,
            format!("must be > 0 {unit}, got {value}"),
        ))
    }
}

fn non_negative(key: &str, value: f64, unit: &str) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::config(
            key,
            format!("must be >= 0 {unit}, got {value}"),
        ))
    }
}

/// Turn a toml error into a config error naming the offending line's key.
fn toml_error(text: &str, err: toml::de::Error) -> Error {
    let key = err
        .span()
        .map(|span| {
            let start = text[..span.start].rfind('\n').map_or(0, |i| i + 1);
            let end = text[span.start..]
                .find('\n')
                .map_or(text.len(), |i| span.start + i);
            let line = text[start..end].trim();
            line.split('=').next().unwrap_or(line).trim().to_string()
        })
        .filter(|k| !k.is_empty())
        .unwrap_or_else(|| "<document>".to_string());
    Error::config(key, err.message().trim().to_string())
}

impl ToolkitConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ToolkitConfig = toml::from_str(text).map_err(|e| toml_error(text, e))?;
        config.validate_values()?;
        Ok(config)
    }

    /// Read, apply defaults, validate values, and check referenced files exist.
    pub fn load(path: &Path) -> Result<Self> {
        let mut config = Self::parse(&read_text(path)?)?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.check_paths()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    fn validate_values(&self) -> Result<()> {
        positive("fiber.radius_mm", self.fiber.radius_mm, "mm")?;
        positive("fiber.modulus_gpa", self.fiber.modulus_gpa, "GPa")?;
        if !(self.fiber.max_strain > 0.0 && self.fiber.max_strain < 1.0) {
            return Err(Error::config(
                "fiber.max_strain",
                format!(
                    "must lie in (0, 1) as a strain fraction, got {}",
                    self.fiber.max_strain
                ),
            ));
        }
        positive("wire.width_mm", self.wire.width_mm, "mm")?;
        non_negative("wire.height_mm", self.wire.height_mm, "mm")?;
        positive("wire.modulus_gpa", self.wire.modulus_gpa, "GPa")?;
        positive("channel.width_mm", self.channel.width_mm, "mm")?;
        positive("channel.height_mm", self.channel.height_mm, "mm")?;
        positive("design.width_min_mm", self.design.width_min_mm, "mm")?;
        positive("design.width_max_mm", self.design.width_max_mm, "mm")?;
        non_negative("design.height_min_mm", self.design.height_min_mm, "mm")?;
        non_negative("design.height_max_mm", self.design.height_max_mm, "mm")?;
        positive("design.step_mm", self.design.step_mm, "mm")?;
        positive("sensor.bias_mm", self.sensor.bias_mm, "mm")?;
        positive("sensor.resolution_mm", self.sensor.resolution_mm, "mm")?;
        non_negative("sensor.noise_ue", self.sensor.noise_ue, "ue")?;
        positive("sensor.rate_hz", self.sensor.rate_hz, "Hz")?;
        for r in &self.jig.radii_mm {
            non_negative("jig.radii_mm", *r, "mm")?;
        }
        positive("jig.slot_length_mm", self.jig.slot_length_mm, "mm")?;
        if self.jig.trials == 0 {
            return Err(Error::config("jig.trials", "must be >= 1"));
        }
        if BendSign::from_i64(self.reconstruction.sign).is_none() {
            return Err(Error::config(
                "reconstruction.sign",
                format!("must be 1 or -1, got {}", self.reconstruction.sign),
            ));
        }
        if let Some(t) = self.reconstruction.threshold_ue {
            non_negative("reconstruction.threshold_ue", t, "ue")?;
        }
        if let Some(h) = self.reconstruction.spacing_mm {
            positive("reconstruction.spacing_mm", h, "mm")?;
        }
        for (i, t) in self.trial.iter().enumerate() {
            let key = |k: &str| format!("trial[{i}].{k}");
            positive(&key("span_mm"), t.span(), "mm")?;
            match t.kind {
                TruthKind::CShape => positive(&key("radius_mm"), t.radius_mm, "mm")?,
                TruthKind::JShape => {
                    positive(&key("radius_mm"), t.radius_mm, "mm")?;
                    non_negative(&key("straight_mm"), t.straight_mm, "mm")?;
                    if t.span() <= t.straight_mm {
                        return Err(Error::config(
                            key("span_mm"),
                            format!("must exceed straight_mm ({} mm)", t.straight_mm),
                        ));
                    }
                }
                TruthKind::Custom => {
                    if t.truth_csv.is_none() {
                        return Err(Error::config(
                            key("truth_csv"),
                            "required for custom trials",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_paths(&self) -> Result<()> {
        let mut paths: Vec<(String, &PathBuf)> = Vec::new();
        if let Some(p) = &self.calibration.model_file {
            paths.push(("calibration.model_file".into(), p));
        }
        if let Some(p) = &self.calibration.manifest {
            paths.push(("calibration.manifest".into(), p));
        }
        for (i, t) in self.trial.iter().enumerate() {
            if let Some(p) = &t.strain_csv {
                paths.push((format!("trial[{i}].strain_csv"), p));
            }
            if let Some(p) = &t.truth_csv {
                paths.push((format!("trial[{i}].truth_csv"), p));
            }
        }
        for (key, p) in paths {
            let resolved = self.resolve(p);
            if !resolved.is_file() {
                return Err(Error::config(
                    key,
                    format!("file {} does not exist", resolved.display()),
                ));
            }
        }
        Ok(())
    }

    pub fn fiber_spec(&self) -> FiberSpec {
        FiberSpec {
            radius_mm: self.fiber.radius_mm,
            modulus_gpa: self.fiber.modulus_gpa,
            max_strain: self.fiber.max_strain,
        }
    }

    pub fn wire_spec(&self) -> WireSpec {
        WireSpec {
            width_mm: self.wire.width_mm,
            height_mm: self.wire.height_mm,
            modulus_gpa: self.wire.modulus_gpa,
        }
    }

    pub fn search_space(&self) -> SearchSpace {
        SearchSpace {
            width_mm: (self.design.width_min_mm, self.design.width_max_mm),
            height_mm: (self.design.height_min_mm, self.design.height_max_mm),
            step_mm: self.design.step_mm,
            wire_modulus_gpa: self.wire.modulus_gpa,
            channel: Channel {
                width_mm: self.channel.width_mm,
                height_mm: self.channel.height_mm,
            },
        }
    }

    pub fn sensor_model(&self) -> SensorModel {
        SensorModel {
            bias_mm: self.sensor.bias_mm,
            spatial_resolution_mm: self.sensor.resolution_mm,
            noise_sigma_ue: self.sensor.noise_ue,
            seed: self.sensor.seed,
        }
    }

    pub fn calibration_jig(&self) -> CalibrationJig {
        CalibrationJig {
            radii_mm: self.jig.radii_mm.clone(),
            slot_length_mm: self.jig.slot_length_mm,
        }
    }
}

/// Load from `path`, or all defaults when no path is given.
pub fn load_config(path: Option<&Path>) -> Result<ToolkitConfig> {
    match path {
        Some(p) => ToolkitConfig::load(p),
        None => Ok(ToolkitConfig::default()),
    }
}
