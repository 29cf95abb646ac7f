use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid calibration point #{index}: strain {strain_ue} ue, radius {radius_mm} mm (both must be > 0)")]
    InvalidPoint {
        index: usize,
        strain_ue: f64,
        radius_mm: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("span mismatch: reconstruction spans {recon_mm} mm, truth spans {truth_mm} mm")]
    SpanMismatch { recon_mm: f64, truth_mm: f64 },

    #[error("average radius undefined: every curvature sample in [{from_mm}, {to_mm}] mm is zero")]
    UndefinedRadius { from_mm: f64, to_mm: f64 },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("{stage} failed for trial `{trial}`: {source}")]
    Stage {
        stage: &'static str,
        trial: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str, trial: &str) -> Self {
        Error::Stage {
            stage,
            trial: trial.to_string(),
            source: Box::new(self),
        }
    }
}
