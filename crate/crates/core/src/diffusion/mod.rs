//! The two samplers: continuous denoising diffusion and masked discrete
//! diffusion, over an abstract denoiser interface.

mod continuous;
mod denoisers;
mod discrete;
mod schedule;

pub use continuous::{continuous_sample, continuous_sample_with_noise};
pub use denoisers::{BpDenoiser, BpDenoiserSpec, ExactDenoiser, InitPolicy};
pub use discrete::discrete_sample;
pub use schedule::{cosine_schedule, cosine_signal, NoiseSchedule};

use crate::bp::BpError;
use crate::instance::{Assignment, CheckOutcome, FactorGraph, InstanceError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiffusionError {
    #[error(transparent)]
    Bp(#[from] BpError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("ordering plan permutation has length {got}, graph has {want} variables")]
    PlanMismatch { got: usize, want: usize },
    #[error("weight vector has length {got}, graph has {want} variables")]
    WeightMismatch { got: usize, want: usize },
    #[error("cavity initialization is only available for discrete SAT denoisers")]
    UnsupportedInit,
}

/// Estimates posterior means of the tilted measure: `y` is the current
/// diffusion state, `omega` the signal fraction, `w_diag` the channel
/// weights. Outputs lie in `[-1, 1]`.
pub trait ContinuousDenoiser {
    fn magnetizations(
        &mut self,
        g: &FactorGraph,
        y: &[f64],
        omega: f64,
        w_diag: &[f64],
    ) -> Result<Vec<f64>, BpError>;
}

/// Estimates conditional marginals given a partial assignment. `p_plus`
/// entries lie in `[0, 1]`; `logits` back the dynamic ordering tie-break.
pub struct DiscreteMarginals {
    pub p_plus: Vec<f64>,
    pub logits: Vec<f64>,
}

pub trait DiscreteDenoiser {
    fn marginals(
        &mut self,
        g: &FactorGraph,
        revealed: &Assignment,
    ) -> Result<DiscreteMarginals, BpError>;

    /// Marginal of a single variable. Static orderings only need the next
    /// variable, so implementations may restrict the computation to its
    /// local neighborhood; the default just runs the full pass.
    fn marginal_at(
        &mut self,
        g: &FactorGraph,
        revealed: &Assignment,
        var: usize,
    ) -> Result<f64, BpError> {
        Ok(self.marginals(g, revealed)?.p_plus[var])
    }
}

/// Outcome of one sampler run.
#[derive(Debug, Clone)]
pub struct SampleTrace {
    pub assignment: Assignment,
    /// Log-probability of each drawn value, in sampling order; empty for
    /// the continuous sampler. The sum is the log-probability of the full
    /// sample under the sampler's own law.
    pub step_logprobs: Vec<f64>,
    pub success: bool,
    /// Violated clauses of the final assignment; counts every clause when
    /// the run aborted before completing the assignment.
    pub violations: usize,
    pub steps: usize,
    pub millis: u64,
    /// True when the denoiser reported an unsatisfiable conditioning.
    pub aborted: bool,
}

impl SampleTrace {
    pub fn logprob_total(&self) -> f64 {
        self.step_logprobs.iter().sum()
    }

    pub(crate) fn from_final(
        g: &FactorGraph,
        assignment: Assignment,
        step_logprobs: Vec<f64>,
        steps: usize,
        millis: u64,
    ) -> Self {
        let outcome = crate::instance::check_assignment(g, &assignment)
            .expect("final assignment must be fully set");
        let violations = outcome.n_violated();
        SampleTrace {
            assignment,
            step_logprobs,
            success: matches!(outcome, CheckOutcome::Satisfied),
            violations,
            steps,
            millis,
            aborted: false,
        }
    }

    pub(crate) fn aborted(
        g: &FactorGraph,
        assignment: Assignment,
        step_logprobs: Vec<f64>,
        steps: usize,
        millis: u64,
    ) -> Self {
        SampleTrace {
            assignment,
            step_logprobs,
            success: false,
            violations: g.n_clauses(),
            steps,
            millis,
            aborted: true,
        }
    }
}
