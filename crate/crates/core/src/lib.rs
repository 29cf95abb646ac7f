//! Shape sensing with a single distributed (OFDR) strain fiber bonded to a
//! flat NiTi wire.
//!
//! - [`design`]: composite-beam neutral plane, sensor bias, wire-size search
//! - [`calibration`]: power-law strain -> bend radius fit
//! - [`reconstruction`]: strain -> curvature -> planar shape
//! - [`metrics`]: jig ground truths and tip / shape / area errors
//! - [`synthesis`]: seeded synthetic interrogator
//! - [`io`] and [`pipeline`]: config, file formats, end-to-end runs

pub mod calibration;
pub mod design;
mod error;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod reconstruction;
pub mod reference;
pub mod synthesis;

pub use error::{Error, Result};
