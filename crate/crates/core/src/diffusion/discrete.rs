//! Masked discrete diffusion: reveal one variable per step, drawing it from
//! the denoiser's conditional marginal.

use rand::Rng;
use std::time::Instant;

use crate::bp::BpError;
use crate::instance::{dynamic_next_variable, Assignment, FactorGraph, OrderingPlan};

use super::{DiffusionError, DiscreteDenoiser, SampleTrace};

/// Runs the masked sampler along the given ordering plan. Static plans walk
/// their permutation; the dynamic plan re-ranks unset variables each step
/// using the reduced-formula min-degree with the denoiser's logits as the
/// tie-break. A denoiser-reported inconsistency aborts the run and records
/// a failure.
pub fn discrete_sample<R: Rng>(
    g: &FactorGraph,
    denoiser: &mut dyn DiscreteDenoiser,
    plan: &OrderingPlan,
    rng: &mut R,
) -> Result<SampleTrace, DiffusionError> {
    let n = g.n_vars();
    if let Some(perm) = &plan.permutation {
        if perm.len() != n {
            return Err(DiffusionError::PlanMismatch { got: perm.len(), want: n });
        }
    }
    let started = Instant::now();
    let mut revealed = Assignment::unset(n);
    let mut logprobs = Vec::with_capacity(n);
    for step in 0..n {
        // static plans know the target up front and only need its marginal
        let queried: Result<(usize, f64), BpError> = match &plan.permutation {
            Some(perm) => {
                let var = perm[step] as usize;
                denoiser.marginal_at(g, &revealed, var).map(|p| (var, p))
            }
            None => match denoiser.marginals(g, &revealed) {
                Ok(marg) => {
                    let var =
                        dynamic_next_variable(g, &revealed, &marg.logits)? as usize;
                    Ok((var, marg.p_plus[var]))
                }
                Err(e) => Err(e),
            },
        };
        let (var, p) = match queried {
            Ok(pair) => pair,
            Err(BpError::InconsistentConditioning { .. }) => {
                return Ok(SampleTrace::aborted(
                    g,
                    revealed,
                    logprobs,
                    step,
                    started.elapsed().as_millis() as u64,
                ));
            }
            Err(e) => return Err(e.into()),
        };
        debug_assert!(!revealed.is_set(var), "plan revisited variable {var}");
        let p = p.clamp(0.0, 1.0);
        let value = if rng.gen::<f64>() < p { 1 } else { -1 };
        logprobs.push(if value > 0 { p.ln() } else { (1.0 - p).ln() });
        revealed.set(var, value);
    }
    Ok(SampleTrace::from_final(
        g,
        revealed,
        logprobs,
        n,
        started.elapsed().as_millis() as u64,
    ))
}
