//! Belief-propagation denoisers for the tilted and conditional solution
//! measures: SAT/XORSAT in discrete (partial-reveal) and continuous
//! (Gaussian-channel) form, plus an exact enumeration oracle.
//!
//! All variants keep only the clause-to-variable messages; variable-side
//! cavity fields are reconstructed through the cavity identity (total field
//! minus the destination clause's own contribution).

mod brute;
mod products;
mod sat;
mod xorsat;

pub use brute::{
    brute_force_marginals, brute_force_marginals_tilted, enumerate_solutions, tilt_field,
    BruteResult, MAX_BRUTE_VARS,
};
pub use products::{leave_one_out_into, leave_one_out_products};
pub use sat::{sat_bp_continuous, sat_bp_discrete};
pub use xorsat::{xorsat_bp_continuous, xorsat_bp_discrete};

use crate::instance::Kind;
use thiserror::Error;

/// Floor for the argument of the logarithm in the SAT clause update.
pub const LOG_FLOOR: f64 = 1e-12;
/// Margin keeping atanh arguments strictly inside (-1, 1).
pub const ATANH_MARGIN: f64 = 1e-12;
/// Default clamp for fields and messages; tanh(30) is 1 to machine precision.
pub const DEFAULT_CLIP: f64 = 30.0;

#[derive(Debug, Error)]
pub enum BpError {
    #[error("expected a {expected} instance, got {got}")]
    WrongKind { expected: Kind, got: Kind },
    #[error("omega must lie in (0, 1), got {0}")]
    OmegaOutOfRange(f64),
    #[error("lambda must be nonnegative, got {0}")]
    NegativeLambda(f64),
    #[error("conflicting forced values at variable {var}: the conditioning is unsatisfiable")]
    InconsistentConditioning { var: usize },
    #[error("instance has {n} variables; enumeration is capped at {max}")]
    TooLargeForEnumeration { n: usize, max: usize },
    #[error("vector length {got} does not match expected {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("init state has {got} messages, graph has {want} directed edges")]
    BadInitState { got: usize, want: usize },
    #[error("init state mode {got:?} does not match denoiser mode {want:?}")]
    ModeMismatch { got: BpMode, want: BpMode },
    #[error("cavity population is empty")]
    EmptyPopulation,
}

/// Which update rule a message state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpMode {
    SatDiscrete,
    SatContinuous,
    XorDiscrete,
    XorContinuous,
}

/// Iteration budget: a fixed round count (the locality radius) or run to a
/// fixed point, capped at `n_vars + n_clauses` rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounds {
    Fixed(u32),
    FixedPoint,
}

impl Rounds {
    pub(crate) fn cap(self, n_vars: usize, n_clauses: usize) -> u32 {
        match self {
            Rounds::Fixed(r) => r,
            Rounds::FixedPoint => (n_vars + n_clauses) as u32,
        }
    }

    pub(crate) fn to_fixed_point(self) -> bool {
        matches!(self, Rounds::FixedPoint)
    }
}

impl std::fmt::Display for Rounds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rounds::Fixed(r) => write!(f, "{r}"),
            Rounds::FixedPoint => write!(f, "inf"),
        }
    }
}

/// Clause-to-variable messages after a run, reusable as a warm start.
/// In `XorDiscrete` mode entries are `0.0` or `±inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    pub mode: BpMode,
    pub msgs: Vec<f64>,
}

/// Message initialization policy for one BP run.
#[derive(Debug, Clone)]
pub enum BpInit {
    /// All clause-to-variable messages start at zero.
    Zero,
    /// Reuse clause-to-variable messages from a previous run.
    Warm(MessageState),
    /// Variable-to-clause cavity fields for the first clause update, indexed
    /// by directed edge; revealed variables should carry `±clip`.
    CavityFields(Vec<f64>),
}

/// Parameters shared by every BP variant.
#[derive(Debug, Clone)]
pub struct BpConfig {
    pub rounds: Rounds,
    /// Early-stop tolerance on the max message change; 0 disables early stop.
    pub tol: f64,
    /// Clamp bound for fields and cavity fields.
    pub clip: f64,
    /// Clause relaxation; 0 is the plain update.
    pub epsilon: f64,
    pub init: BpInit,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            rounds: Rounds::Fixed(1),
            tol: 0.0,
            clip: DEFAULT_CLIP,
            epsilon: 0.0,
            init: BpInit::Zero,
        }
    }
}

impl BpConfig {
    pub fn with_rounds(rounds: Rounds) -> Self {
        BpConfig { rounds, ..Default::default() }
    }
}

/// Result of a BP run: final per-variable fields plus the message state.
/// Fields are clamped log-likelihood-ratio-like quantities; in XORSAT
/// discrete mode they take values in `{-inf, 0, +inf}`.
#[derive(Debug, Clone)]
pub struct BpOutput {
    pub fields: Vec<f64>,
    pub state: MessageState,
    pub rounds_run: u32,
}

impl BpOutput {
    /// `P(x_i = +1)` implied by the field.
    pub fn p_plus(&self) -> Vec<f64> {
        self.fields.iter().map(|&h| 0.5 * (1.0 + h.tanh())).collect()
    }

    /// Magnetizations `tanh(H_i)`.
    pub fn magnetizations(&self) -> Vec<f64> {
        self.fields.iter().map(|&h| h.tanh()).collect()
    }
}

pub(crate) fn validate_init_msgs(
    init: &BpInit,
    n_edges: usize,
    mode: BpMode,
) -> Result<(), BpError> {
    match init {
        BpInit::Zero => Ok(()),
        BpInit::Warm(state) => {
            if state.msgs.len() != n_edges {
                return Err(BpError::BadInitState { got: state.msgs.len(), want: n_edges });
            }
            if state.mode != mode {
                return Err(BpError::ModeMismatch { got: state.mode, want: mode });
            }
            Ok(())
        }
        BpInit::CavityFields(h) => {
            if h.len() != n_edges {
                return Err(BpError::BadInitState { got: h.len(), want: n_edges });
            }
            Ok(())
        }
    }
}
