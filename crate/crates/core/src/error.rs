use std::path::PathBuf;

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree parameter k = {k} is outside the supported range {min}..={max}")]
    DegreeOutOfRange { k: usize, min: usize, max: usize },

    #[error("vertex index {index} is out of range for a graph with {count} vertices")]
    VertexOutOfRange { index: usize, count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("requested {what} {requested} but only {available} available")]
    Range {
        what: &'static str,
        requested: usize,
        available: usize,
    },

    #[error("graph is not distance-regular: {0}")]
    NotDistanceRegular(String),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("ladder action deviates by {deviation:e} at level {level} ({operator})")]
    LadderViolation {
        level: usize,
        operator: &'static str,
        deviation: f64,
    },

    #[error("continued fraction hit a pole at z = {z}; nearest atom at x = {nearest_atom:?}")]
    PoleProximity {
        z: Complex64,
        nearest_atom: Option<f64>,
    },

    #[error("eigenvalue iteration failed to converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("Gauss weight mismatch at atom {index}: eigenvector {eigen:e} vs residue {residue:e}")]
    WeightMismatch {
        index: usize,
        eigen: f64,
        residue: f64,
    },

    #[error("cache at {path} is locked by another writer")]
    CacheLocked { path: PathBuf },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
