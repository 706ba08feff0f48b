use std::io;

/// Errors raised anywhere in the reconstruction pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("solver error: {0}")]
    Solver(String),
    /// A deformation inverted or flattened a triangle; the caller should shrink the step.
    #[error("step too large: triangle {triangle} has signed area {area:e} (floor {floor:e})")]
    StepTooLarge {
        triangle: usize,
        area: f64,
        floor: f64,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
