use std::path::PathBuf;

use crate::netlist::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Netlist text could not be parsed. Carries every diagnostic found.
    #[error("netlist parse failed: {}", first_message(.0))]
    Parse(Vec<Diagnostic>),

    /// A structurally parsed netlist violates one or more rules.
    #[error("netlist validation failed: {}", first_message(.0))]
    Validation(Vec<Diagnostic>),

    /// The computation is well-formed but produced no usable answer
    /// (impossible evidence, all counters zero, underflow).
    #[error("degenerate computation: {0}")]
    Degenerate(String),

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

fn first_message(diags: &[Diagnostic]) -> String {
    match diags.first() {
        Some(d) if diags.len() == 1 => d.to_string(),
        Some(d) => format!("{d} (and {} more)", diags.len() - 1),
        None => "no diagnostics".to_string(),
    }
}
