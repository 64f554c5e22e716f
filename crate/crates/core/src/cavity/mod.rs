//! Population-dynamics machinery: the masked-diffusion threshold (closed
//! form and numeric), the continuous-diffusion threshold via two coupled
//! populations, cavity-field populations for BP initialization, and the
//! reference threshold table.

mod diff;
mod ksat;
mod mask;
mod table;

pub use diff::{default_t_grid, estimate_alpha_diff, popdyn_xorsat_diff, DiffPopConfig};
pub use ksat::{build_population_cache, cavity_init_messages, popdyn_cavity_ksat, PopulationCache};
pub use mask::{
    alpha_mask_closed_form, estimate_alpha_mask_numeric, mask_degenerate_point,
    mask_recursion_gap, MaskDegeneratePoint, MaskGap,
};
pub use table::{
    threshold_row, ThresholdRow, SAT_ALPHA_D_K4, SAT_ALPHA_MASK_K4, XORSAT_THRESHOLDS,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CavityError {
    #[error("clause size k must be at least 3, got {0}")]
    KTooSmall(usize),
    #[error("population must be nonempty")]
    EmptyPopulation,
    #[error("no XORSAT threshold row for k = {0}")]
    UnknownK(usize),
}

/// An empirical sample of cavity fields approximating a field distribution.
/// Hard (infinite) fields are stored as `±clip` sentinels.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub samples: Vec<f64>,
    pub k: usize,
    pub alpha: f64,
    /// Reveal/noise parameter the population was equilibrated at.
    pub t: f64,
    pub sweeps: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
