//! SAT belief propagation, discrete and continuous variants.
//!
//! Messages live on directed clause-to-variable edges and are nonnegative
//! (a clause only ever pushes a variable towards its satisfying value; the
//! literal sign routes the push when fields are accumulated). The clause
//! update is
//!
//! ```text
//! u = -1/2 * ln(1 - (1-eps) * 2^{-(k-1)} * prod_{j != i} (1 - tanh(s_j * h_j)))
//! ```
//!
//! with `h_j` the cavity field of member `j` (total field minus the
//! destination clause's own signed contribution) and the log argument
//! floored away from zero.

use crate::instance::{Assignment, FactorGraph, Kind};

use super::products::leave_one_out_into;
use super::{
    validate_init_msgs, BpConfig, BpError, BpInit, BpMode, BpOutput, MessageState, LOG_FLOOR,
};

/// Conditional-measure denoiser: revealed entries of `revealed` are pinned
/// with `±clip` fields. Returns per-variable fields whose tanh gives the
/// estimated marginals.
pub fn sat_bp_discrete(
    g: &FactorGraph,
    revealed: &Assignment,
    cfg: BpConfig,
) -> Result<BpOutput, BpError> {
    if g.kind() != Kind::Sat {
        return Err(BpError::WrongKind { expected: Kind::Sat, got: g.kind() });
    }
    if revealed.len() != g.n_vars() {
        return Err(BpError::LengthMismatch { got: revealed.len(), want: g.n_vars() });
    }
    let pin: Vec<f64> =
        (0..g.n_vars()).map(|i| revealed.get(i) as f64 * cfg.clip).collect();
    run(g, &pin, cfg, BpMode::SatDiscrete)
}

/// Tilted-measure denoiser for the Gaussian channel
/// `y = sqrt(omega) W x + sqrt(1-omega) g`: the external field is
/// `sqrt(omega)/(1-omega) * W_ii * y_i`.
pub fn sat_bp_continuous(
    g: &FactorGraph,
    y: &[f64],
    omega: f64,
    w_diag: &[f64],
    cfg: BpConfig,
) -> Result<BpOutput, BpError> {
    if g.kind() != Kind::Sat {
        return Err(BpError::WrongKind { expected: Kind::Sat, got: g.kind() });
    }
    if !(omega > 0.0 && omega < 1.0) {
        return Err(BpError::OmegaOutOfRange(omega));
    }
    if y.len() != g.n_vars() {
        return Err(BpError::LengthMismatch { got: y.len(), want: g.n_vars() });
    }
    if w_diag.len() != g.n_vars() {
        return Err(BpError::LengthMismatch { got: w_diag.len(), want: g.n_vars() });
    }
    let coef = omega.sqrt() / (1.0 - omega);
    let pin: Vec<f64> =
        y.iter().zip(w_diag).map(|(&yi, &wi)| coef * wi * yi).collect();
    run(g, &pin, cfg, BpMode::SatContinuous)
}

fn run(g: &FactorGraph, pin: &[f64], cfg: BpConfig, mode: BpMode) -> Result<BpOutput, BpError> {
    let n = g.n_vars();
    let m = g.n_clauses();
    let k = g.k();
    let ne = g.n_edges();
    validate_init_msgs(&cfg.init, ne, mode)?;

    let mut pending_cavity: Option<Vec<f64>> = None;
    let mut msgs: Vec<f64> = match cfg.init {
        BpInit::Zero => vec![0.0; ne],
        BpInit::Warm(state) => state.msgs,
        BpInit::CavityFields(h) => {
            pending_cavity = Some(h);
            vec![0.0; ne]
        }
    };
    let mut next = vec![0.0; ne];
    let mut fields = vec![0.0; n];
    let mut terms = vec![0.0; ne]; // 1 - tanh(s*h) per edge
    let mut loo = vec![0.0; k];
    let two_pow = 0.5f64.powi(k as i32 - 1);
    let keep = 1.0 - cfg.epsilon;

    let max_rounds = cfg.rounds.cap(n, m);
    let mut rounds_run = 0;
    while rounds_run < max_rounds {
        // variable side: cavity fields, either injected or via the identity
        match pending_cavity.take() {
            Some(h0) => {
                for (e, &h) in h0.iter().enumerate() {
                    let s = g.edge_sign(e as u32) as f64;
                    terms[e] = 1.0 - (s * h.clamp(-cfg.clip, cfg.clip)).tanh();
                }
            }
            None => {
                total_fields(g, pin, &msgs, &mut fields);
                for e in 0..ne {
                    let i = g.edge_var(e as u32) as usize;
                    let s = g.edge_sign(e as u32) as f64;
                    let cav = (fields[i] - s * msgs[e]).clamp(-cfg.clip, cfg.clip);
                    terms[e] = 1.0 - (s * cav).tanh();
                }
            }
        }
        // clause side
        let mut delta: f64 = 0.0;
        for a in 0..m {
            let base = a * k;
            leave_one_out_into(&terms[base..base + k], &mut loo);
            for j in 0..k {
                let arg = (1.0 - keep * two_pow * loo[j]).max(LOG_FLOOR);
                let u = (-0.5 * arg.ln()).min(cfg.clip);
                delta = delta.max((u - msgs[base + j]).abs());
                next[base + j] = u;
            }
        }
        std::mem::swap(&mut msgs, &mut next);
        rounds_run += 1;
        if delta < cfg.tol || (cfg.rounds.to_fixed_point() && delta == 0.0) {
            break;
        }
    }

    total_fields(g, pin, &msgs, &mut fields);
    for f in &mut fields {
        *f = f.clamp(-cfg.clip, cfg.clip);
    }
    Ok(BpOutput { fields, state: MessageState { mode, msgs }, rounds_run })
}

/// `fields[i] = pin[i] + sum_e s_e * msgs[e]` over edges incident to i.
fn total_fields(g: &FactorGraph, pin: &[f64], msgs: &[f64], fields: &mut [f64]) {
    for i in 0..g.n_vars() {
        let mut acc = pin[i];
        for &e in g.var_edges(i) {
            acc += g.edge_sign(e) as f64 * msgs[e as usize];
        }
        fields[i] = acc;
    }
}
