//! Comma-separated strain and shape files.
//!
//! Strain files carry `s_mm,strain_ue`; shape files `s_mm,x_mm,y_mm,theta_rad`.
//! Lines starting with `#` are comments; `# key=value` comments in strain
//! files hold acquisition metadata. Floats are written in shortest
//! round-trip form, so reading back yields the identical `f64`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::reconstruction::{PlanarShape, Point2, ProfileMeta, StrainProfile};

pub const STRAIN_HEADER: [&str; 2] = ["s_mm", "strain_ue"];
pub const SHAPE_HEADER: [&str; 4] = ["s_mm", "x_mm", "y_mm", "theta_rad"];

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_rows<const N: usize>(
    text: &str,
    header: [&str; N],
    origin: &str,
) -> Result<Vec<[f64; N]>> {
    let parse_err = |message: String| Error::Parse {
        path: origin.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = reader
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(parse_err(format!(
            "expected header `{}`, found `{}`",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let mut row = [0.0; N];
        for (slot, field) in row.iter_mut().zip(record.iter()) {
            *slot = field
                .parse()
                .map_err(|_| parse_err(format!("line {line}: `{field}` is not a number")))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

fn parse_meta(text: &str) -> ProfileMeta {
    let mut meta = ProfileMeta::default();
    for line in text.lines() {
        let Some(comment) = line.trim().strip_prefix('#') else {
            continue;
        };
        let Some((key, value)) = comment.split_once('=') else {
            continue;
        };
        let value = value.trim();
        match key.trim() {
            "rate_hz" => meta.rate_hz = value.parse().ok(),
            "sensor_id" => meta.sensor_id = Some(value.to_string()),
            "timestamp_s" => meta.timestamp_s = value.parse().ok(),
            _ => {}
        }
    }
    meta
}

pub fn parse_strain_csv(text: &str, origin: &str) -> Result<StrainProfile> {
    let rows = parse_rows(text, STRAIN_HEADER, origin)?;
    let (positions, strains) = rows.iter().map(|r| (r[0], r[1])).unzip();
    StrainProfile::new(positions, strains)
        .map(|p| p.with_meta(parse_meta(text)))
        .map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })
}

pub fn read_strain_csv(path: &Path) -> Result<StrainProfile> {
    parse_strain_csv(&read_text(path)?, &path.display().to_string())
}

pub fn format_strain_csv(profile: &StrainProfile) -> String {
    let mut out = String::new();
    let meta = &profile.meta;
    if let Some(id) = &meta.sensor_id {
        let _ = writeln!(out, "# sensor_id={id}");
    }
    if let Some(rate) = meta.rate_hz {
        let _ = writeln!(out, "# rate_hz={rate}");
    }
    if let Some(t) = meta.timestamp_s {
        let _ = writeln!(out, "# timestamp_s={t}");
    }
    out.push_str(&STRAIN_HEADER.join(","));
    out.push('\n');
    for (s, e) in profile.positions().iter().zip(profile.strains()) {
        let _ = writeln!(out, "{s},{e}");
    }
    out
}

pub fn write_strain_csv(path: &Path, profile: &StrainProfile) -> Result<()> {
    write_text(path, &format_strain_csv(profile))
}

pub fn parse_shape_csv(text: &str, origin: &str) -> Result<PlanarShape> {
    let rows = parse_rows(text, SHAPE_HEADER, origin)?;
    PlanarShape::new(
        rows.iter().map(|r| Point2::new(r[1], r[2])).collect(),
        rows.iter().map(|r| r[3]).collect(),
        rows.iter().map(|r| r[0]).collect(),
    )
    .map_err(|e| Error::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })
}

pub fn read_shape_csv(path: &Path) -> Result<PlanarShape> {
    parse_shape_csv(&read_text(path)?, &path.display().to_string())
}

pub fn format_shape_csv(shape: &PlanarShape) -> String {
    let mut out = SHAPE_HEADER.join(",");
    out.push('\n');
    for ((s, p), theta) in shape
        .arc_lengths
        .iter()
        .zip(&shape.points)
        .zip(&shape.headings)
    {
        let _ = writeln!(out, "{s},{},{},{theta}", p.x, p.y);
    }
    out
}

pub fn write_shape_csv(path: &Path, shape: &PlanarShape) -> Result<()> {
    write_text(path, &format_shape_csv(shape))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_comments_and_meta() {
        let text =
            "# sensor_id=ssa-1\n# rate_hz=62.5\ns_mm,strain_ue\n1.3,10\n# mid comment\n2.6, 12.5\n";
        let p = parse_strain_csv(text, "mem").unwrap();
        assert_eq!(p.positions(), &[1.3, 2.6]);
        assert_eq!(p.strains(), &[10.0, 12.5]);
        assert_eq!(p.meta.rate_hz, Some(62.5));
        assert_eq!(p.meta.sensor_id.as_deref(), Some("ssa-1"));
    }

    #[test]
    fn rejects_wrong_header_and_garbage() {
        assert!(parse_strain_csv("s,e\n1,2\n", "mem").is_err());
        let err = parse_strain_csv("s_mm,strain_ue\n1,abc\n", "mem").unwrap_err();
        assert!(err.to_string().contains("abc"), "{err}");
        assert!(parse_strain_csv("s_mm,strain_ue\n2,1\n1,1\n", "mem").is_err());
    }

    proptest! {
        #[test]
        fn strain_csv_round_trips_exactly(
            start in -1e3f64..1e3,
            steps in prop::collection::vec(1e-6f64..10.0, 1..40),
            strains in prop::collection::vec(-1e5f64..1e5, 40),
        ) {
            let mut s = start;
            let positions: Vec<f64> = steps.iter().map(|d| { s += d; s }).collect();
            let strains = strains[..positions.len()].to_vec();
            let p = StrainProfile::new(positions, strains).unwrap();
            let back = parse_strain_csv(&format_strain_csv(&p), "mem").unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn shape_csv_round_trips_exactly(
            coords in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3, -10f64..10.0), 2..30),
        ) {
            let shape = PlanarShape::new(
                coords.iter().map(|c| Point2::new(c.0, c.1)).collect(),
                coords.iter().map(|c| c.2).collect(),
                (0..coords.len()).map(|i| i as f64 * 1.3).collect(),
            ).unwrap();
            let back = parse_shape_csv(&format_shape_csv(&shape), "mem").unwrap();
            prop_assert_eq!(back, shape);
        }
    }
}
