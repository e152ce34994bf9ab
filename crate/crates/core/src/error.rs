use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("drive voltage range [{min:.1}, {max:.1}] V leaves the actuator envelope [{env_min:.1}, {env_max:.1}] V")]
    EnvelopeViolation {
        min: f64,
        max: f64,
        env_min: f64,
        env_max: f64,
    },

    #[error("non-finite {field} at t = {time} s")]
    NonFinite { time: f64, field: &'static str },

    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
