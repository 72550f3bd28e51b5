use std::io;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid torus parameters: {0}")]
    InvalidTorus(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("torus T({l1}, {l2}, {alpha} rad) does not satisfy the perfect-periodicity condition")]
    NotPerfectlyPeriodic { l1: f64, l2: f64, alpha: f64 },

    #[error("circumradius hypothesis violated: 2r = {diameter} is not < 1")]
    CircumradiusHypothesis { diameter: f64 },

    #[error("vertex {index} out of range for a graph with {count} vertices")]
    VertexOutOfRange { index: usize, count: usize },

    #[error("membership length {found} does not match vertex count {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("instance has {vertices} vertices, above the limit of {limit}")]
    SizeGuard { vertices: usize, limit: usize },

    #[error("start set is not independent")]
    NotIndependent,

    #[error("search window must be at least 1")]
    InvalidWindow,

    #[error("x = {0} lies outside (sqrt(3)/2, 1)")]
    CroftDomain(f64),

    #[error("set size {size} exceeds vertex count {vertices}")]
    SetTooLarge { size: usize, vertices: usize },

    #[error(
        "density {bound} exceeds the published upper bound 0.2470; \
         the construction must be re-verified independently"
    )]
    UpperBoundViolation { bound: f64 },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid solver config: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
