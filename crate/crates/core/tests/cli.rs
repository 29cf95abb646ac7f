use std::path::Path;
use std::process::{Command, Output};

use ofdr_shape::io::{read_shape_csv, read_strain_csv, ModelFile};

fn run(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_ofdr-shape"))
        .current_dir(dir)
        .env_remove("OFDR_SHAPE_CONFIG")
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn calibrate_simulate_reconstruct_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    run(d, &["calibrate", "--synthetic", "--out", "model.toml"]);
    let model = ModelFile::load(&d.join("model.toml")).unwrap();
    assert!((model.exponent + 1.0).abs() < 1e-9);
    assert!(d.join("model.toml.manifest.toml").exists());

    run(
        d,
        &[
            "simulate", "--kind", "c", "--radius", "80", "--out", "c2.csv",
        ],
    );
    let strain = read_strain_csv(&d.join("c2.csv")).unwrap();
    assert_eq!(strain.len(), 131);

    run(
        d,
        &[
            "reconstruct",
            "--model",
            "model.toml",
            "--strain",
            "c2.csv",
            "--out",
            "shape.csv",
            "--svg",
            "shape.svg",
        ],
    );
    let shape = read_shape_csv(&d.join("shape.csv")).unwrap();
    assert_eq!(shape.len(), 132);
    assert!(std::fs::read_to_string(d.join("shape.svg"))
        .unwrap()
        .starts_with("<svg"));

    let out = run(
        d,
        &[
            "evaluate",
            "--shape",
            "shape.csv",
            "--kind",
            "c",
            "--radius",
            "80",
            "--trial",
            "C2",
        ],
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    let row = stdout
        .lines()
        .find(|l| l.starts_with("C2,"))
        .expect("report row");
    let tip: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!(tip < 0.1, "{row}");
}

#[test]
fn pipeline_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("run.toml"),
        "[calibration]\nsynthesize = true\n\n[[trial]]\nname = \"J1\"\nkind = \"j_shape\"\nradius_mm = 100\n",
    )
    .unwrap();
    run(d, &["--config", "run.toml", "pipeline", "--out", "out"]);
    for f in [
        "model.toml",
        "report.csv",
        "manifest.toml",
        "J1_shape.csv",
        "J1_strain.csv",
        "J1_overlay.svg",
    ] {
        assert!(d.join("out").join(f).exists(), "missing {f}");
    }
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.toml"), "[fiber]\nradius_mm = -1.0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ofdr-shape"))
        .current_dir(d)
        .args(["--config", "bad.toml", "design"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fiber.radius_mm"), "{err}");
}

#[test]
fn calibrate_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut manifest = String::new();
    for (i, r) in [0.0, 100.0, 80.0, 60.0].iter().enumerate() {
        let strain = if *r == 0.0 { 0.0 } else { 0.15 / r * 1e6 };
        let mut csv = String::from("s_mm,strain_ue\n");
        for k in 1..=50 {
            let wobble = if k % 2 == 0 { 1.0 } else { -1.0 };
            csv.push_str(&format!("{},{}\n", k as f64 * 1.3, strain + wobble));
        }
        std::fs::write(d.join(format!("slot{i}.csv")), csv).unwrap();
        manifest.push_str(&format!(
            "[[slot]]\nradius_mm = {r}\nfiles = [\"slot{i}.csv\"]\n\n"
        ));
    }
    std::fs::write(d.join("cal.toml"), manifest).unwrap();
    run(
        d,
        &["calibrate", "--manifest", "cal.toml", "--out", "model.toml"],
    );
    let model = ModelFile::load(&d.join("model.toml")).unwrap();
    assert!((model.exponent + 1.0).abs() < 1e-9, "{model:?}");
    assert!((model.coefficient - 150_000.0).abs() < 1e-3, "{model:?}");
    assert_eq!(model.straight_threshold_ue, 3.0);
}
