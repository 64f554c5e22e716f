//! XORSAT belief propagation: the three-valued erasure variant used by the
//! masked sampler and the real-valued tanh variant used by the continuous
//! sampler.

use crate::instance::{Assignment, FactorGraph, Kind};

use super::products::leave_one_out_into;
use super::{
    validate_init_msgs, BpConfig, BpError, BpInit, BpMode, BpOutput, MessageState, ATANH_MARGIN,
};

/// Erasure-channel denoiser: messages and fields take values in
/// `{-inf, 0, +inf}`. Revealed variables inject hard pins; the run stops at
/// the first fixed point (reached within the graph diameter) or after the
/// configured number of rounds.
///
/// Once a field becomes `±inf` it never changes again, and a `±inf` field
/// is always consistent with the exact conditional marginal; a conflicting
/// pair of forced values signals an unsatisfiable conditioning.
pub fn xorsat_bp_discrete(
    g: &FactorGraph,
    revealed: &Assignment,
    cfg: BpConfig,
) -> Result<BpOutput, BpError> {
    if g.kind() != Kind::Xorsat {
        return Err(BpError::WrongKind { expected: Kind::Xorsat, got: g.kind() });
    }
    if revealed.len() != g.n_vars() {
        return Err(BpError::LengthMismatch { got: revealed.len(), want: g.n_vars() });
    }
    let n = g.n_vars();
    let m = g.n_clauses();
    let k = g.k();
    let ne = g.n_edges();
    validate_init_msgs(&cfg.init, ne, BpMode::XorDiscrete)?;

    let pin: Vec<i8> = (0..n).map(|i| revealed.get(i)).collect();
    let mut pending_cavity: Option<Vec<i8>> = None;
    let mut msgs: Vec<i8> = match &cfg.init {
        BpInit::Zero => vec![0; ne],
        BpInit::Warm(state) => state.msgs.iter().map(|&u| ternary(u)).collect(),
        BpInit::CavityFields(h) => {
            pending_cavity = Some(h.iter().map(|&v| ternary(v)).collect());
            vec![0; ne]
        }
    };
    let mut next = vec![0i8; ne];
    let mut cav = vec![0i8; ne];

    let max_rounds = cfg.rounds.cap(n, m);
    let mut rounds_run = 0;
    while rounds_run < max_rounds {
        match pending_cavity.take() {
            Some(h0) => cav.copy_from_slice(&h0),
            None => cavity_signs(g, &pin, &msgs, &mut cav)?,
        }
        let mut changed = false;
        for a in 0..m {
            let base = a * k;
            let members = &cav[base..base + k];
            let zeros = members.iter().filter(|&&h| h == 0).count();
            let sign_all: i8 = members.iter().filter(|&&h| h != 0).product();
            for j in 0..k {
                // leave-one-out product of signs; a member's own ±1 factor
                // cancels by multiplication since signs square to one
                let u = match zeros {
                    0 => g.parity(a) * sign_all * members[j],
                    1 if members[j] == 0 => g.parity(a) * sign_all,
                    _ => 0,
                };
                changed |= u != msgs[base + j];
                next[base + j] = u;
            }
        }
        std::mem::swap(&mut msgs, &mut next);
        rounds_run += 1;
        if !changed {
            break;
        }
    }

    let mut fields = vec![0.0f64; n];
    for (i, field) in fields.iter_mut().enumerate() {
        let s = aggregate_sign(g, &pin, &msgs, i, None)?;
        *field = match s {
            0 => 0.0,
            _ => s as f64 * f64::INFINITY,
        };
    }
    let state = MessageState {
        mode: BpMode::XorDiscrete,
        msgs: msgs
            .iter()
            .map(|&u| match u {
                0 => 0.0,
                _ => u as f64 * f64::INFINITY,
            })
            .collect(),
    };
    Ok(BpOutput { fields, state, rounds_run })
}

fn ternary(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Infinity-safe sign of `pin + sum of incoming messages`, optionally
/// excluding one edge. Conflicting hard values raise an error.
fn aggregate_sign(
    g: &FactorGraph,
    pin: &[i8],
    msgs: &[i8],
    var: usize,
    exclude: Option<u32>,
) -> Result<i8, BpError> {
    let mut plus = pin[var] == 1;
    let mut minus = pin[var] == -1;
    for &e in g.var_edges(var) {
        if Some(e) == exclude {
            continue;
        }
        match msgs[e as usize] {
            1 => plus = true,
            -1 => minus = true,
            _ => {}
        }
    }
    match (plus, minus) {
        (true, true) => Err(BpError::InconsistentConditioning { var }),
        (true, false) => Ok(1),
        (false, true) => Ok(-1),
        (false, false) => Ok(0),
    }
}

fn cavity_signs(
    g: &FactorGraph,
    pin: &[i8],
    msgs: &[i8],
    cav: &mut [i8],
) -> Result<(), BpError> {
    for i in 0..g.n_vars() {
        // conflict check over the full neighborhood once per variable
        aggregate_sign(g, pin, msgs, i, None)?;
        for &e in g.var_edges(i) {
            cav[e as usize] = aggregate_sign(g, pin, msgs, i, Some(e))?;
        }
    }
    Ok(())
}

/// Tanh-product denoiser for the continuous sampler: the external field is
/// `lambda * y_i` and clause messages are
/// `atanh(s_a * prod_{j != i} tanh(h_j))` with the atanh argument kept
/// strictly inside (-1, 1).
pub fn xorsat_bp_continuous(
    g: &FactorGraph,
    y: &[f64],
    lambda: f64,
    cfg: BpConfig,
) -> Result<BpOutput, BpError> {
    if g.kind() != Kind::Xorsat {
        return Err(BpError::WrongKind { expected: Kind::Xorsat, got: g.kind() });
    }
    if lambda < 0.0 {
        return Err(BpError::NegativeLambda(lambda));
    }
    if y.len() != g.n_vars() {
        return Err(BpError::LengthMismatch { got: y.len(), want: g.n_vars() });
    }
    let n = g.n_vars();
    let m = g.n_clauses();
    let k = g.k();
    let ne = g.n_edges();
    validate_init_msgs(&cfg.init, ne, BpMode::XorContinuous)?;

    let pin: Vec<f64> = y.iter().map(|&yi| lambda * yi).collect();
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
    let mut th = vec![0.0; ne];
    let mut loo = vec![0.0; k];
    let bound = 1.0 - ATANH_MARGIN;

    let max_rounds = cfg.rounds.cap(n, m);
    let mut rounds_run = 0;
    while rounds_run < max_rounds {
        match pending_cavity.take() {
            Some(h0) => {
                for (t, &h) in th.iter_mut().zip(&h0) {
                    *t = h.clamp(-cfg.clip, cfg.clip).tanh();
                }
            }
            None => {
                total_fields(g, &pin, &msgs, &mut fields);
                for e in 0..ne {
                    let i = g.edge_var(e as u32) as usize;
                    let cav = (fields[i] - msgs[e]).clamp(-cfg.clip, cfg.clip);
                    th[e] = cav.tanh();
                }
            }
        }
        let mut delta: f64 = 0.0;
        for a in 0..m {
            let base = a * k;
            leave_one_out_into(&th[base..base + k], &mut loo);
            let parity = g.parity(a) as f64;
            for j in 0..k {
                let u = (parity * loo[j]).clamp(-bound, bound).atanh();
                let u = u.clamp(-cfg.clip, cfg.clip);
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

    total_fields(g, &pin, &msgs, &mut fields);
    for f in &mut fields {
        *f = f.clamp(-cfg.clip, cfg.clip);
    }
    Ok(BpOutput { fields, state: MessageState { mode: BpMode::XorContinuous, msgs }, rounds_run })
}

fn total_fields(g: &FactorGraph, pin: &[f64], msgs: &[f64], fields: &mut [f64]) {
    for i in 0..g.n_vars() {
        let mut acc = pin[i];
        for &e in g.var_edges(i) {
            acc += msgs[e as usize];
        }
        fields[i] = acc;
    }
}
