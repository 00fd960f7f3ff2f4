//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimension mismatch between two objects that must agree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A constructor or operation received a value outside its domain.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An evaluation left the mathematical domain (e.g. log of a
    /// non-positive weight).
    #[error("domain error: {0}")]
    Domain(String),

    /// A probability table with zero samples.
    #[error("probability table has no samples")]
    EmptyTable,

    /// An operation needed ground-truth data that was not ingested.
    #[error("ground-truth preference data required but not present")]
    MissingGroundTruth,

    /// The coefficient ratio sits on (or numerically at) a pole of f.
    #[error("beta ratio {beta} is within tolerance of the pole at 2*mu_j = {pole} (mu_j = {mu})")]
    Pole { beta: f64, pole: f64, mu: f64 },

    /// The descent produced a non-finite loss.
    #[error("optimization diverged ({0}); try a smaller step size")]
    Divergence(String),

    /// A text input failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
