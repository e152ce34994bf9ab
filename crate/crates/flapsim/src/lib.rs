//! File formats, logging and experiment drivers around `flapsim-core`.

pub mod bundled;
pub mod config;
pub mod error;
pub mod output;
pub mod report;

pub use error::{Error, Result};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "FLAPSIM_OUT";
