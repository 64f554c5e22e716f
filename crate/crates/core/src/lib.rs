//! Sampling solutions of random k-SAT and k-XORSAT formulas with
//! denoising diffusions whose denoisers are belief-propagation marginal
//! estimators.
//!
//! The crate is organized around the experiment pipeline:
//!
//! * [`instance`] — formula generation, validation, leaf removal, variable
//!   orderings, exact XORSAT solving, DIMACS/XNF serialization.
//! * [`bp`] — the four BP denoiser variants (SAT/XORSAT × discrete/continuous)
//!   plus an exhaustive-enumeration oracle for small instances.
//! * [`diffusion`] — the continuous (denoising) and masked discrete samplers
//!   over an abstract denoiser interface.
//! * [`cavity`] — population dynamics: cavity-field populations for BP
//!   initialization and the sampling-threshold estimators.
//! * [`harness`] — reproducible sweeps, uniformity diagnostics, CSV/JSON
//!   persistence.
//!
//! All randomized operations are deterministic given their seed; sweep
//! results are independent of the worker count (the `parallel` feature only
//! changes how jobs are scheduled, never which seeds they consume).

pub mod bp;
pub mod cavity;
pub mod diffusion;
pub mod exec;
pub mod harness;
pub mod instance;
pub mod rng;
pub mod stats;

#[doc(hidden)]
pub mod testkit;
