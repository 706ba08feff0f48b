//! Batch experiment runner for CCBM obstacle reconstruction.

pub mod checks;
pub mod config;
pub mod experiment;
pub mod gallery;

pub use config::{parse_config, RunConfig};
pub use experiment::{generate_data, run_experiment, Overrides, RunSummary};
pub use gallery::{run_gallery, GalleryRow, GALLERY_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] ccbm_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// A reconstruction failed; its partial artifacts were written.
    #[error("run failed after {iterations} iterations: {message}")]
    Run { message: String, iterations: usize },
    /// A verification check ran but did not meet its threshold.
    #[error("check failed: {0}")]
    Check(String),
}
