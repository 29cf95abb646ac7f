//! calibrate -> reconstruct -> evaluate, per configured trial.

use std::path::{Path, PathBuf};

use crate::calibration::{calibrate, Calibration};
use crate::error::{Error, Result};
use crate::io::config::{ToolkitConfig, TrialBlock};
use crate::io::model_file::{CalibrationManifest, ModelFile};
use crate::io::svg::{self, Series};
use crate::io::tables::{
    format_shape_csv, format_strain_csv, read_shape_csv, read_strain_csv, write_text,
};
use crate::io::RunManifest;
use crate::metrics::{evaluate, ErrorReport, GroundTruth, TruthKind};
use crate::reconstruction::{
    integrate_shape, resample_profile, strains_to_curvatures, CurvatureProfile, PlanarShape, Pose,
    StrainProfile,
};
use crate::synthesis::{strain_from_truth, synth_calibration_dataset, SensorModel};

/// Calibration plus the files it was read from.
#[derive(Debug, Clone)]
pub struct ResolvedCalibration {
    pub calibration: ModelFile,
    pub inputs: Vec<PathBuf>,
}

/// Pick the calibration source named in the config.
pub fn resolve_calibration(config: &ToolkitConfig) -> Result<ResolvedCalibration> {
    let block = &config.calibration;
    if let Some(path) = &block.model_file {
        let path = config.resolve(path);
        return Ok(ResolvedCalibration {
            calibration: ModelFile::load(&path)?,
            inputs: vec![path],
        });
    }
    if let Some(path) = &block.manifest {
        let path = config.resolve(path);
        let (manifest, mut files) = CalibrationManifest::load(&path)?;
        let slots = manifest.load_slots(path.parent().unwrap_or(Path::new(".")))?;
        let cal = calibrate(&slots)?;
        files.insert(0, path);
        return Ok(ResolvedCalibration {
            calibration: ModelFile::from_calibration(&cal),
            inputs: files,
        });
    }
    if block.synthesize {
        let slots = synth_calibration_dataset(
            &config.calibration_jig(),
            &config.sensor_model(),
            config.jig.trials,
        )?;
        let cal: Calibration = calibrate(&slots)?;
        return Ok(ResolvedCalibration {
            calibration: ModelFile::from_calibration(&cal),
            inputs: vec![],
        });
    }
    Err(Error::config(
        "calibration",
        "no calibration source: set calibration.model_file, calibration.manifest, or calibration.synthesize = true",
    ))
}

/// Everything produced for one trial.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub name: String,
    pub truth: GroundTruth,
    pub strain: StrainProfile,
    /// True when the strain was generated rather than read from disk.
    pub synthesized: bool,
    pub curvature: CurvatureProfile,
    pub shape: PlanarShape,
    pub report: ErrorReport,
}

pub fn build_truth(config: &ToolkitConfig, trial: &TrialBlock) -> Result<GroundTruth> {
    let spacing = config.sensor.resolution_mm;
    match trial.kind {
        TruthKind::CShape => GroundTruth::c_shape(trial.radius_mm, trial.span(), spacing),
        TruthKind::JShape => {
            GroundTruth::j_shape(trial.radius_mm, trial.straight_mm, trial.span(), spacing)
        }
        TruthKind::Custom => {
            let path = trial
                .truth_csv
                .as_ref()
                .ok_or_else(|| Error::config("trial.truth_csv", "required for custom trials"))?;
            Ok(GroundTruth::custom(read_shape_csv(&config.resolve(path))?))
        }
    }
}

/// Reconstruct one strain profile with the configured reconstruction block.
pub fn reconstruct(
    config: &ToolkitConfig,
    model: &ModelFile,
    strain: &StrainProfile,
) -> Result<(CurvatureProfile, PlanarShape)> {
    let block = &config.reconstruction;
    let profile = match block.spacing_mm {
        Some(h) => resample_profile(strain, h)?,
        None => strain.clone(),
    };
    let threshold = block.threshold_ue.unwrap_or(model.straight_threshold_ue);
    let curvature = strains_to_curvatures(&model.model(), &profile, threshold, block.bend_sign())?;
    let shape = integrate_shape(&curvature, Pose::default(), block.scheme)?;
    Ok((curvature, shape))
}

fn run_trial(
    config: &ToolkitConfig,
    model: &ModelFile,
    index: usize,
    trial: &TrialBlock,
) -> Result<TrialOutcome> {
    let name = trial.name.as_str();
    let truth = build_truth(config, trial).map_err(|e| e.in_stage("truth", name))?;
    let (strain, synthesized) = match &trial.strain_csv {
        Some(path) => (
            read_strain_csv(&config.resolve(path)).map_err(|e| e.in_stage("load", name))?,
            false,
        ),
        None => {
            let sensor = SensorModel {
                seed: config.sensor.seed.wrapping_add(index as u64),
                ..config.sensor_model()
            };
            (
                strain_from_truth(&truth, &sensor).map_err(|e| e.in_stage("simulate", name))?,
                true,
            )
        }
    };
    let (curvature, shape) =
        reconstruct(config, model, &strain).map_err(|e| e.in_stage("reconstruct", name))?;
    let report = evaluate(
        &shape,
        &truth,
        Some(&curvature),
        Some(strain.mean_strain()),
        None,
    )
    .map_err(|e| e.in_stage("evaluate", name))?;
    Ok(TrialOutcome {
        name: trial.name.clone(),
        truth,
        strain,
        synthesized,
        curvature,
        shape,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub calibration: ResolvedCalibration,
    pub trials: Vec<TrialOutcome>,
}

impl PipelineResult {
    pub fn report_table(&self) -> String {
        let mut out = String::from(ErrorReport::CSV_HEADER);
        out.push('\n');
        for t in &self.trials {
            out.push_str(&t.report.csv_row(&t.name));
            out.push('\n');
        }
        out
    }
}

/// Run every configured trial. With `parallel`, trials run on scoped threads;
/// results keep the configured order either way.
pub fn run_pipeline(config: &ToolkitConfig, parallel: bool) -> Result<PipelineResult> {
    if config.trial.is_empty() {
        return Err(Error::config("trial", "no [[trial]] entries configured"));
    }
    let calibration =
        resolve_calibration(config).map_err(|e| e.in_stage("calibrate", "calibration"))?;
    let model = &calibration.calibration;

    let trials = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = config
                .trial
                .iter()
                .enumerate()
                .map(|(i, t)| scope.spawn(move || run_trial(config, model, i, t)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("trial thread panicked"))
                .collect::<Result<Vec<_>>>()
        })?
    } else {
        config
            .trial
            .iter()
            .enumerate()
            .map(|(i, t)| run_trial(config, model, i, t))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(PipelineResult {
        calibration,
        trials,
    })
}

fn file_name_safe(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Write shapes, strains, overlays, the report table, the model and a manifest
/// into `dir`. Returns the written paths.
pub fn write_artifacts(
    config: &ToolkitConfig,
    result: &PipelineResult,
    dir: &Path,
    mut manifest: RunManifest,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        let path = dir.join(name);
        write_text(&path, &text)?;
        written.push(path);
        Ok(())
    };
    put(
        "model.toml".into(),
        result.calibration.calibration.to_toml(),
    )?;
    for t in &result.trials {
        let stem = file_name_safe(&t.name);
        if t.synthesized {
            put(format!("{stem}_strain.csv"), format_strain_csv(&t.strain))?;
        }
        put(format!("{stem}_shape.csv"), format_shape_csv(&t.shape))?;
        if config.output.svg {
            put(
                format!("{stem}_overlay.svg"),
                svg::render(&[
                    Series {
                        label: "expected",
                        shape: &t.truth.shape,
                        color: "black",
                    },
                    Series {
                        label: "reconstructed",
                        shape: &t.shape,
                        color: "crimson",
                    },
                ]),
            )?;
        }
    }
    put("report.csv".into(), result.report_table())?;

    for input in &result.calibration.inputs {
        manifest.add_input(input)?;
    }
    for t in &config.trial {
        for p in [&t.strain_csv, &t.truth_csv].into_iter().flatten() {
            manifest.add_input(&config.resolve(p))?;
        }
    }
    let path = dir.join("manifest.toml");
    manifest.save(&path)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ToolkitConfig {
        ToolkitConfig::parse(text).unwrap()
    }

    const C_TRIALS: &str = r#"
[calibration]
synthesize = true

[[trial]]
name = "C1"
kind = "c_shape"
radius_mm = 100

[[trial]]
name = "C2"
kind = "c_shape"
radius_mm = 80

[[trial]]
name = "C3"
kind = "c_shape"
radius_mm = 60
"#;

    #[test]
    fn synthetic_c_trials_recover_radius() {
        let result = run_pipeline(&config(C_TRIALS), false).unwrap();
        for (t, r) in result.trials.iter().zip([100.0, 80.0, 60.0]) {
            let got = t.report.average_radius_mm;
            assert!(((got - r) / r).abs() < 0.01, "{}: {got}", t.name);
        }
    }

    #[test]
    fn missing_calibration_is_named() {
        let cfg = config("[[trial]]\nname = \"C1\"\nkind = \"c_shape\"\nradius_mm = 100\n");
        let err = run_pipeline(&cfg, false).unwrap_err();
        let text = err.to_string();
        assert!(
            text.contains("calibrate") && text.contains("calibration source"),
            "{text}"
        );
    }

    #[test]
    fn reference_model_constant_strain() {
        let dir = tempfile::tempdir().unwrap();
        let model = dir.path().join("model.toml");
        ModelFile::from_model(&crate::calibration::PowerLawModel::reference(), 0.0)
            .save(&model)
            .unwrap();
        let positions = crate::reconstruction::uniform_grid(170.0, 1.3);
        let strain =
            StrainProfile::new(positions.clone(), vec![1784.726; positions.len()]).unwrap();
        let strain_path = dir.path().join("c2.csv");
        crate::io::write_strain_csv(&strain_path, &strain).unwrap();
        let cfg_path = dir.path().join("cfg.toml");
        std::fs::write(
            &cfg_path,
            "[calibration]\nmodel_file = \"model.toml\"\n[[trial]]\nname = \"C2\"\nkind = \"c_shape\"\nradius_mm = 80\nstrain_csv = \"c2.csv\"\n",
        )
        .unwrap();
        let cfg = ToolkitConfig::load(&cfg_path).unwrap();
        let result = run_pipeline(&cfg, false).unwrap();
        // 126099.3715 * 1784.726^-0.97984 = 82.166
        assert!((result.trials[0].report.average_radius_mm - 82.166).abs() < 0.01);
        assert!(!result.trials[0].synthesized);
    }

    #[test]
    fn parallel_matches_sequential_and_is_deterministic() {
        let text = format!("[sensor]\nnoise_ue = 10\nseed = 4\n{C_TRIALS}");
        let cfg = config(&text);
        let a = run_pipeline(&cfg, false).unwrap();
        let b = run_pipeline(&cfg, true).unwrap();
        assert_eq!(a.report_table(), b.report_table());
        for (x, y) in a.trials.iter().zip(&b.trials) {
            assert_eq!(format_shape_csv(&x.shape), format_shape_csv(&y.shape));
        }
    }

    #[test]
    fn stage_attribution_on_bad_trial() {
        let cfg = config(
            "[calibration]\nsynthesize = true\n[reconstruction]\nspacing_mm = 500\n[[trial]]\nname = \"C9\"\nkind = \"c_shape\"\nradius_mm = 100\n",
        );
        let err = run_pipeline(&cfg, false).unwrap_err();
        assert!(
            matches!(&err, Error::Stage { stage: "reconstruct", trial, .. } if trial == "C9"),
            "{err}"
        );
    }
}
