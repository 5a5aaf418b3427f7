use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building problems, running solvers, or driving the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("alpha = {alpha} is not grid-aligned for N = {n_cells} (requires alpha = m/N)")]
    NotGridAligned { alpha: f64, n_cells: usize },

    #[error("interface index m = {m} leaves a subdomain thinner than 2 cells (N = {n_cells})")]
    SubdomainTooThin { m: usize, n_cells: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("operation not available in {dim}D: {what}")]
    UnsupportedDimension { dim: usize, what: &'static str },

    #[error("side mismatch: solution lives on the {found} subdomain, expected {expected}")]
    SideMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("matrix is singular or not positive definite at pivot {0}")]
    Singular(usize),

    #[error("{path}: {reason}")]
    Csv { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{key}: {reason}")]
    Usage { key: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn usage(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Usage {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
