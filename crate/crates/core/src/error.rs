use thiserror::Error;

use crate::quantum::ModeLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode label {0} appears more than once")]
    LabelCollision(ModeLabel),

    #[error("mode label {0} is not part of the state")]
    UnknownLabel(ModeLabel),

    #[error("label sets differ: {left} vs {right}")]
    LabelMismatch { left: String, right: String },

    #[error("expected {expected} amplitudes for {modes} modes, got {actual}")]
    DimensionMismatch {
        modes: usize,
        expected: usize,
        actual: usize,
    },

    #[error("states are limited to {max} modes, got {actual}")]
    TooManyModes { max: usize, actual: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid subsystem cut: {0}")]
    InvalidCut(String),

    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("transducer parameters violate {0}")]
    InvalidTransducer(String),

    #[error("link configuration: {0}")]
    InvalidLink(String),

    #[error("unsupported archetype placement: {0}")]
    UnsupportedVariant(String),

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("malformed EPR resource: {0}")]
    MalformedResource(String),

    #[error("measurement outcome ({0}, {1}) has zero probability")]
    ImpossibleOutcome(u8, u8),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

/// Checks `lo <= value <= hi` (rejects NaN).
pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    domain: &'static str,
) -> Result<f64> {
    if value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            domain,
        })
    }
}
