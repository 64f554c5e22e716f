//! Approximate-uniformity diagnostic for discrete samplers.
//!
//! A masked sampler knows the probability of its own output, so
//! `N^{-1} log(1/mu_hat(x))` is computable per sample. If the sampler were
//! exactly uniform over solutions this would concentrate on
//! `N^{-1} log Z`, and `phi(alpha) = log 2 + alpha log(1 - 2^{-k})`
//! (the annealed estimate of that quantity) upper-bounds the expected KL
//! divergence gap.

use crate::diffusion::{DiffusionError, SampleTrace};
use crate::instance::FactorGraph;
use crate::stats::{mean, pop_std};

/// `phi(alpha) = ln 2 + alpha * ln(1 - 2^{-k})`, in nats.
pub fn phi(k: usize, alpha: f64) -> f64 {
    assert!(alpha >= 0.0);
    std::f64::consts::LN_2 + alpha * (1.0 - 0.5f64.powi(k as i32)).ln()
}

/// Summary of the per-sample `N^{-1} log(1/mu_hat)` distribution.
#[derive(Debug, Clone)]
pub struct UniformityReport {
    pub values: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub phi: f64,
    /// `phi(alpha) - mean`: the annealed upper bound on the per-variable
    /// KL divergence from uniform.
    pub kl_upper_bound: f64,
    pub n_failures: usize,
    pub n_samples: usize,
}

/// Draws `n_samples` from the provided sampler closure and aggregates the
/// normalized sample log-probabilities. Failed samples are excluded from
/// the histogram and counted. Returns `None` when no sample succeeds.
pub fn uniformity_test<F>(
    g: &FactorGraph,
    mut draw: F,
    n_samples: usize,
) -> Result<Option<UniformityReport>, DiffusionError>
where
    F: FnMut(usize) -> Result<SampleTrace, DiffusionError>,
{
    let n = g.n_vars() as f64;
    let mut values = Vec::with_capacity(n_samples);
    let mut failures = 0usize;
    for sample_idx in 0..n_samples {
        let trace = draw(sample_idx)?;
        if trace.success {
            values.push(-trace.logprob_total() / n);
        } else {
            failures += 1;
        }
    }
    if values.is_empty() {
        return Ok(None);
    }
    let m = mean(&values);
    let reference = phi(g.k(), g.alpha());
    Ok(Some(UniformityReport {
        mean: m,
        std: pop_std(&values),
        phi: reference,
        kl_upper_bound: reference - m,
        n_failures: failures,
        n_samples,
        values,
    }))
}
