use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ofdr_shape::calibration::calibrate;
use ofdr_shape::design::{design_search, SsaGeometry};
use ofdr_shape::io::svg::{self, Series};
use ofdr_shape::io::{
    format_shape_csv, format_strain_csv, load_config, read_shape_csv, read_strain_csv,
    CalibrationManifest, ModelFile, RunManifest, ToolkitConfig, CONFIG_ENV,
};
use ofdr_shape::metrics::{evaluate, GroundTruth, TruthKind, J_STRAIGHT_MM};
use ofdr_shape::pipeline::{reconstruct, run_pipeline, write_artifacts};
use ofdr_shape::reconstruction::{BendSign, Scheme};
use ofdr_shape::synthesis::{
    bias_presets, strain_from_truth, stream_frames, synth_calibration_dataset,
};

#[derive(Parser)]
#[command(
    name = "ofdr-shape",
    version,
    about = "Single-fiber OFDR shape sensing toolkit"
)]
struct Cli {
    /// Toolkit config (TOML). Defaults apply when omitted.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank flat-wire sizes by sensor bias; writes a CSV table.
    Design(DesignArgs),
    /// Fit the strain -> radius power law from jig measurements.
    Calibrate(CalibrateArgs),
    /// Reconstruct a planar shape from a strain CSV.
    Reconstruct(ReconstructArgs),
    /// Score a reconstructed shape against a jig shape.
    Evaluate(EvaluateArgs),
    /// Generate synthetic strain for a jig shape.
    Simulate(SimulateArgs),
    /// Calibrate, reconstruct and evaluate every configured trial.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Keep only the first N candidates.
    #[arg(long)]
    top: Option<usize>,
    /// Drop candidates that do not fit the channel.
    #[arg(long)]
    feasible_only: bool,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Manifest listing strain CSVs per jig slot.
    #[arg(long, conflicts_with = "synthetic")]
    manifest: Option<PathBuf>,
    /// Calibrate on a synthetic jig dataset from the config's sensor and jig blocks.
    #[arg(long)]
    synthetic: bool,
    /// Noise seed for --synthetic; defaults to sensor.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    strain: PathBuf,
    /// Shape CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// SVG plot of the shape.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Curvature CSV (1/mm and 1/m) to write.
    #[arg(long)]
    curvature_out: Option<PathBuf>,
    /// Resample the strain to this spacing (mm) first.
    #[arg(long)]
    spacing: Option<f64>,
    /// Straight threshold (ue); defaults to the model file's value.
    #[arg(long)]
    threshold: Option<f64>,
    /// Bend direction for positive strain: 1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<i64>,
    #[arg(long)]
    scheme: Option<Scheme>,
}

#[derive(Args)]
struct TruthArgs {
    /// c_shape or j_shape.
    #[arg(long)]
    kind: Option<TruthKind>,
    #[arg(long)]
    radius: Option<f64>,
    /// Shape length (mm).
    #[arg(long)]
    span: Option<f64>,
    /// Straight lead-in of J shapes (mm).
    #[arg(long, default_value_t = J_STRAIGHT_MM)]
    straight: f64,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Reconstructed shape CSV.
    #[arg(long)]
    shape: PathBuf,
    #[command(flatten)]
    truth: TruthArgs,
    /// Truth as a shape CSV instead of kind/radius.
    #[arg(long, conflicts_with = "kind")]
    truth_csv: Option<PathBuf>,
    /// Strain CSV the shape came from, for the average-strain column.
    #[arg(long)]
    strain: Option<PathBuf>,
    /// Comparison grid spacing (mm); defaults to the shape's spacing.
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long, default_value = "trial")]
    trial: String,
    /// Write an SVG overlay of reconstruction and truth.
    #[arg(long)]
    emit_overlay: Option<PathBuf>,
    /// Also write the key-value report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    truth: TruthArgs,
    /// Lever arm (mm); defaults to the config's sensor block.
    #[arg(long)]
    bias: Option<f64>,
    #[arg(long)]
    resolution: Option<f64>,
    /// Gaussian noise sigma (ue).
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of frames; more than one writes a directory of CSVs.
    #[arg(long, default_value_t = 1)]
    frames: usize,
    #[arg(long)]
    rate: Option<f64>,
    /// Output CSV, or directory when --frames > 1.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// Output directory; overrides output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run trials concurrently.
    #[arg(long)]
    parallel: bool,
    /// Noise seed; overrides sensor.seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn args_vec() -> Vec<String> {
    std::env::args().collect()
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn save_manifest(
    command: &str,
    config: &ToolkitConfig,
    output: &Path,
    inputs: &[&Path],
) -> Result<()> {
    let mut manifest = RunManifest::new(command, args_vec(), Some(config.hash()));
    for input in inputs {
        manifest.add_input(input)?;
    }
    manifest.save(&RunManifest::path_for(output))?;
    Ok(())
}

fn cmd_design(config: &ToolkitConfig, args: DesignArgs) -> Result<()> {
    let fiber = config.fiber_spec();
    let chosen = SsaGeometry::new(fiber, config.wire_spec())?;
    eprintln!(
        "configured wire {} x {} mm: neutral plane {:.6} mm, bias {:.6} mm (reported {} mm), min bend radius {:.3} mm",
        chosen.wire.width_mm,
        chosen.wire.height_mm,
        chosen.neutral_plane_mm,
        chosen.bias_mm,
        bias_presets::REPORTED_MM,
        chosen.min_bend_radius_mm
    );

    let candidates = design_search(&fiber, &config.search_space())?;
    let mut out = String::from("width_mm,height_mm,bias_mm,min_bend_radius_mm,fits_channel\n");
    candidates
        .iter()
        .filter(|c| !args.feasible_only || c.fits_channel)
        .take(args.top.unwrap_or(usize::MAX))
        .for_each(|c| {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.wire.width_mm, c.wire.height_mm, c.bias_mm, c.min_bend_radius_mm, c.fits_channel
            ))
        });
    match args.out {
        Some(path) => {
            write(&path, &out)?;
            save_manifest("design", config, &path, &[])?;
        }
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_calibrate(config: &ToolkitConfig, args: CalibrateArgs) -> Result<()> {
    let (slots, inputs) = if let Some(path) = &args.manifest {
        let (manifest, files) = CalibrationManifest::load(path)?;
        let slots = manifest.load_slots(path.parent().unwrap_or(Path::new(".")))?;
        let mut inputs = vec![path.clone()];
        inputs.extend(files);
        (slots, inputs)
    } else if args.synthetic {
        let mut sensor = config.sensor_model();
        if let Some(seed) = args.seed {
            sensor.seed = seed;
        }
        let slots =
            synth_calibration_dataset(&config.calibration_jig(), &sensor, config.jig.trials)?;
        (slots, vec![])
    } else {
        bail!("calibrate needs --manifest <file> or --synthetic");
    };

    let cal = calibrate(&slots)?;
    let file = ModelFile::from_calibration(&cal);
    file.save(&args.out)?;
    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    save_manifest("calibrate", config, &args.out, &input_refs)?;

    eprintln!(
        "radius_mm = {} * strain_ue^{} over {:.1}..{:.1} ue ({} slots, rms ln residual {:.3e}); straight threshold {:.3} ue",
        cal.model.coefficient,
        cal.model.exponent,
        cal.model.fit_domain_ue.0,
        cal.model.fit_domain_ue.1,
        cal.points.len(),
        cal.residuals.rms_ln,
        cal.straight_threshold_ue
    );
    for (strain, radius) in &cal.points {
        eprintln!(
            "  {radius:>6} mm ({:.3} 1/m): {strain:.3} ue",
            1000.0 / radius
        );
    }
    Ok(())
}

fn cmd_reconstruct(config: &ToolkitConfig, args: ReconstructArgs) -> Result<()> {
    let mut config = config.clone();
    let block = &mut config.reconstruction;
    if let Some(s) = args.spacing {
        block.spacing_mm = Some(s);
    }
    if let Some(t) = args.threshold {
        block.threshold_ue = Some(t);
    }
    if let Some(s) = args.sign {
        if BendSign::from_i64(s).is_none() {
            bail!("--sign must be 1 or -1, got {s}");
        }
        block.sign = s;
    }
    if let Some(s) = args.scheme {
        block.scheme = s;
    }

    let model = ModelFile::load(&args.model)?;
    let strain = read_strain_csv(&args.strain)?;
    let (curvature, shape) = reconstruct(&config, &model, &strain)?;

    write(&args.out, &format_shape_csv(&shape))?;
    if let Some(path) = &args.curvature_out {
        let mut text = String::from("s_mm,kappa_per_mm,kappa_per_m\n");
        for ((s, k), km) in curvature
            .positions
            .iter()
            .zip(&curvature.curvatures)
            .zip(curvature.per_metre())
        {
            text.push_str(&format!("{s},{k},{km}\n"));
        }
        write(path, &text)?;
    }
    if let Some(path) = &args.svg {
        svg::write(
            path,
            &[Series {
                label: "reconstructed",
                shape: &shape,
                color: "crimson",
            }],
        )?;
    }
    save_manifest(
        "reconstruct",
        &config,
        &args.out,
        &[&args.model, &args.strain],
    )?;

    let limit = SsaGeometry::new(config.fiber_spec(), config.wire_spec())?.min_bend_radius_mm;
    if !curvature.within_bend_limit(limit) {
        eprintln!("warning: curvature exceeds the assembly bend limit ({limit:.2} mm radius)");
    }
    let tip = shape.tip();
    eprintln!(
        "{} points over {:.3} mm, tip ({:.3}, {:.3}) mm, heading {:.4} rad",
        shape.len(),
        shape.span(),
        tip.x,
        tip.y,
        shape.headings.last().copied().unwrap_or_default()
    );
    Ok(())
}

fn truth_from_args(
    args: &TruthArgs,
    default_span: Option<f64>,
    spacing: f64,
) -> Result<GroundTruth> {
    let kind = args.kind.context("--kind is required (c_shape|j_shape)")?;
    let radius = args.radius.context("--radius is required")?;
    let span = match (args.span, default_span) {
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => match kind {
            TruthKind::JShape => 150.0,
            _ => 170.0,
        },
    };
    Ok(match kind {
        TruthKind::CShape => GroundTruth::c_shape(radius, span, spacing)?,
        TruthKind::JShape => GroundTruth::j_shape(radius, args.straight, span, spacing)?,
        TruthKind::Custom => bail!("custom truths are given with --truth-csv"),
    })
}

fn cmd_evaluate(config: &ToolkitConfig, args: EvaluateArgs) -> Result<()> {
    let shape = read_shape_csv(&args.shape)?;
    let truth = match &args.truth_csv {
        Some(path) => GroundTruth::custom(read_shape_csv(path)?),
        None => truth_from_args(&args.truth, Some(shape.span()), config.sensor.resolution_mm)?,
    };
    let strain = args.strain.as_deref().map(read_strain_csv).transpose()?;
    let report = evaluate(
        &shape,
        &truth,
        None,
        strain.as_ref().map(|s| s.mean_strain()),
        args.spacing,
    )?;

    let text = report.key_values();
    print!("{text}");
    println!("{}", ofdr_shape::metrics::ErrorReport::CSV_HEADER);
    println!("{}", report.csv_row(&args.trial));

    let mut inputs: Vec<&Path> = vec![&args.shape];
    inputs.extend(args.truth_csv.as_deref());
    inputs.extend(args.strain.as_deref());
    if let Some(path) = &args.out {
        write(path, &text)?;
        save_manifest("evaluate", config, path, &inputs)?;
    }
    if let Some(path) = &args.emit_overlay {
        svg::write(
            path,
            &[
                Series {
                    label: "expected",
                    shape: &truth.shape,
                    color: "black",
                },
                Series {
                    label: "reconstructed",
                    shape: &shape,
                    color: "crimson",
                },
            ],
        )?;
        save_manifest("evaluate", config, path, &inputs)?;
    }
    Ok(())
}

fn cmd_simulate(config: &ToolkitConfig, args: SimulateArgs) -> Result<()> {
    let mut sensor = config.sensor_model();
    if let Some(b) = args.bias {
        sensor.bias_mm = b;
    }
    if let Some(r) = args.resolution {
        sensor.spatial_resolution_mm = r;
    }
    if let Some(n) = args.noise {
        sensor.noise_sigma_ue = n;
    }
    if let Some(s) = args.seed {
        sensor.seed = s;
    }
    let rate = args.rate.unwrap_or(config.sensor.rate_hz);
    let truth = truth_from_args(&args.truth, None, sensor.spatial_resolution_mm)?;

    if args.frames <= 1 {
        let profile = strain_from_truth(&truth, &sensor)?;
        write(&args.out, &format_strain_csv(&profile))?;
        save_manifest("simulate", config, &args.out, &[])?;
        eprintln!(
            "{} samples, mean strain {:.3} ue",
            profile.len(),
            profile.mean_strain()
        );
    } else {
        let poses = vec![truth; args.frames];
        let stream = stream_frames(&poses, &sensor, rate)?;
        std::fs::create_dir_all(&args.out)
            .with_context(|| format!("creating {}", args.out.display()))?;
        for (k, frame) in stream.frames.iter().enumerate() {
            write(
                &args.out.join(format!("frame_{k:05}.csv")),
                &format_strain_csv(frame),
            )?;
        }
        save_manifest("simulate", config, &args.out.join("frames"), &[])?;
        eprintln!(
            "{} frames at {} Hz",
            stream.frames.len(),
            stream.frame_rate_hz
        );
    }
    Ok(())
}

fn cmd_pipeline(config: &ToolkitConfig, args: PipelineArgs) -> Result<()> {
    let mut config = config.clone();
    if let Some(seed) = args.seed {
        config.sensor.seed = seed;
    }
    let config = &config;
    let result = run_pipeline(config, args.parallel)?;
    let dir = args
        .out
        .unwrap_or_else(|| config.resolve(&config.output.dir));
    let manifest = RunManifest::new("pipeline", args_vec(), Some(config.hash()));
    write_artifacts(config, &result, &dir, manifest)?;
    print!("{}", result.report_table());
    eprintln!("artifacts in {}", dir.display());
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config =
        load_config(cli.config.as_deref()).with_context(|| "loading config".to_string())?;
    match cli.command {
        Command::Design(a) => cmd_design(&config, a),
        Command::Calibrate(a) => cmd_calibrate(&config, a),
        Command::Reconstruct(a) => cmd_reconstruct(&config, a),
        Command::Evaluate(a) => cmd_evaluate(&config, a),
        Command::Simulate(a) => cmd_simulate(&config, a),
        Command::Pipeline(a) => cmd_pipeline(&config, a),
    }
}
