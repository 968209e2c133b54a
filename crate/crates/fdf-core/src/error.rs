//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by grid construction, configuration parsing, time
/// stepping, and the verification harnesses.
#[derive(Debug, Error)]
pub enum FdfError {
    /// A structural problem with a grid request (odd size, too small, ...).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// An argument outside the supported domain of an operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Field or symbol values that are NaN or infinite where finite values
    /// are required.
    #[error("non-finite data: {0}")]
    NonFinite(String),

    /// The solution exceeded the configured amplitude cap or became
    /// non-finite during time stepping.
    #[error("blow-up detected at t = {time:.6e} (step {step}): max|u| = {max_abs:.6e}")]
    BlowUp { time: f64, step: u64, max_abs: f64 },

    /// A sampler or verifier ended up with nothing to report.
    #[error("empty sample: {0}")]
    EmptySample(String),

    /// A malformed configuration document. `line` is 1-based when known.
    #[error("config error{}{}: {message}", fmt_line(.line), fmt_key(.key))]
    Config {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },

    /// A malformed or inconsistent snapshot file.
    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn fmt_line(line: &Option<usize>) -> String {
    match line {
        Some(n) => format!(" at line {n}"),
        None => String::new(),
    }
}

fn fmt_key(key: &Option<String>) -> String {
    match key {
        Some(k) => format!(" (key `{k}`)"),
        None => String::new(),
    }
}

impl FdfError {
    /// Shorthand for a config error with a known line and key.
    pub fn config_at(line: usize, key: impl Into<String>, message: impl Into<String>) -> Self {
        FdfError::Config {
            line: Some(line),
            key: Some(key.into()),
            message: message.into(),
        }
    }

    /// Shorthand for a config error not tied to a specific line.
    pub fn config(message: impl Into<String>) -> Self {
        FdfError::Config {
            line: None,
            key: None,
            message: message.into(),
        }
    }

    /// Shorthand for a config error about a key that appears on no line,
    /// typically because it is missing.
    pub fn config_key(key: impl Into<String>, message: impl Into<String>) -> Self {
        FdfError::Config {
            line: None,
            key: Some(key.into()),
            message: message.into(),
        }
    }
}
