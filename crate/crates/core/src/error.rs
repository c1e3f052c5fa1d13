//! Error type shared across the crate.
//!
//! The variants map onto the CLI exit-code contract: configuration/usage
//! problems exit with code 2, everything else (data, environment, training,
//! i/o) exits with code 1.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LudorError {
    /// Invalid configuration: bad shapes, unknown keys, out-of-range values.
    #[error("configuration error: {0}")]
    Config(String),

    /// Dataset-level failure: empty result, dimension mismatch, bad file.
    #[error("dataset error: {0}")]
    Data(String),

    /// Environment-level failure (non-finite state, unknown environment).
    #[error("environment error: {0}")]
    Env(String),

    /// Training failure carrying the offending step index.
    #[error("training error at step {step}: {msg}")]
    Training { step: u64, msg: String },

    /// A batch whose discrepancy weights sum to zero; callers skip the
    /// update and count the incident instead of aborting the run.
    #[error("degenerate batch: {0}")]
    DegenerateBatch(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl LudorError {
    /// Process exit code for the CLI: 2 for usage/configuration errors,
    /// 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            LudorError::Config(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, LudorError>;
