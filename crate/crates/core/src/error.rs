use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("director must be a unit vector, got |n| = {0}")]
    NonUnitDirector(f64),

    #[error("grid size {0} must be a power of two and at least 16")]
    InvalidGrid(usize),

    #[error("box length {0} must be positive and finite")]
    InvalidBox(f64),

    #[error("fields live on incompatible grids ({0})")]
    GridMismatch(String),

    #[error("time evolution requires xi = 0, got xi = {0}")]
    NonzeroXi(f64),

    #[error("velocity field is not solenoidal (relative divergence {0:e})")]
    NotSolenoidal(f64),

    #[error("numerical failure at step {step} (t = {t}): {what}")]
    NumericalFailure { step: usize, t: f64, what: String, last_good: Option<PathBuf> },

    #[error("undefined quantity: {0}")]
    Undefined(&'static str),

    #[error(transparent)]
    Config(#[from] crate::io::config::ConfigError),

    #[error(transparent)]
    Snapshot(#[from] crate::io::snapshot::SnapshotError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
