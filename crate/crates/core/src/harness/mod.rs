//! Reproducible experiment runner: success-rate sweeps over
//! (kind, k, N, alpha, method, denoiser, ordering, init) grids, uniformity
//! diagnostics, CSV/JSON persistence.

mod config;
mod sweep;
mod uniformity;

pub use config::{parse_config, DenoiserName, ExperimentConfig, InitName, Method};
pub use sweep::{
    records_from_csv, records_to_csv, run_sweep, PointSummary, SweepRecord, SweepResult,
};
pub use uniformity::{phi, uniformity_test, UniformityReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("config key '{key}': {msg}")]
    BadValue { key: String, msg: String },
    #[error("missing required config key '{0}'")]
    MissingKey(String),
    #[error(transparent)]
    Instance(#[from] crate::instance::InstanceError),
    #[error(transparent)]
    Diffusion(#[from] crate::diffusion::DiffusionError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
