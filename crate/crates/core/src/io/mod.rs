//! Files and formats: config, strain/shape tables, model files, manifests, plots.

pub mod config;
pub mod manifest;
pub mod model_file;
pub mod svg;
pub mod tables;

pub use config::{load_config, ToolkitConfig, CONFIG_ENV};
pub use manifest::RunManifest;
pub use model_file::{CalibrationManifest, ModelFile};
pub use tables::{
    format_shape_csv, format_strain_csv, parse_shape_csv, parse_strain_csv, read_shape_csv,
    read_strain_csv, write_shape_csv, write_strain_csv,
};
