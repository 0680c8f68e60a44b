//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Errors raised while building or running a discretization.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mode index {index} out of range (basis has {size} modes)")]
    ModeOutOfRange { index: usize, size: usize },

    #[error(
        "point ({x}, {y}) lies on a coefficient interface; a one-sided limit must be selected"
    )]
    OnInterface { x: f64, y: f64 },

    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("interface line {0} is not aligned with any mesh line")]
    MisalignedInterface(String),

    #[error("boundary edge has no exterior trace")]
    NoExteriorTrace,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("singular local system in cell {cell}")]
    SingularLocalSystem { cell: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(
        "instability detected at step {step} ({reason}); the time step {dt:e} is probably too \
         large, suggested bound is {suggested:e}"
    )]
    Unstable {
        step: usize,
        reason: String,
        dt: f64,
        suggested: f64,
    },

    #[error("coefficient sign mismatch: perturbed a² is not positive at x = ({x}, {y})")]
    SignMismatch { x: f64, y: f64 },

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("failed to parse configuration: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV output failure: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON output failure: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}
