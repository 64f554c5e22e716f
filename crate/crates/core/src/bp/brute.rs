//! Exhaustive enumeration oracle for small instances: exact marginals of
//! the uniform-over-solutions measure, optionally conditioned on a partial
//! assignment or tilted by an external field.

use crate::instance::{Assignment, FactorGraph, Kind};

use super::BpError;

/// Largest variable count accepted by the enumeration routines.
pub const MAX_BRUTE_VARS: usize = 20;

/// Exact marginals, or a zero-mass flag when the conditioning kills every
/// configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum BruteResult {
    ZeroMass,
    /// `P(x_i = +1)` per variable.
    Marginals(Vec<f64>),
}

impl BruteResult {
    pub fn marginals(&self) -> Option<&[f64]> {
        match self {
            BruteResult::ZeroMass => None,
            BruteResult::Marginals(p) => Some(p),
        }
    }
}

/// Per-clause data for O(1) evaluation on bitmask assignments. Bit i set
/// means x_i = -1.
struct ClauseMasks {
    masks: Vec<u32>,
    /// SAT: the unique all-false pattern; XORSAT: parity bit (1 for s = -1).
    targets: Vec<u32>,
    kind: Kind,
}

impl ClauseMasks {
    fn new(g: &FactorGraph) -> Self {
        let mut masks = Vec::with_capacity(g.n_clauses());
        let mut targets = Vec::with_capacity(g.n_clauses());
        for a in 0..g.n_clauses() {
            let mut mask = 0u32;
            for &v in g.clause_vars(a) {
                mask |= 1 << v;
            }
            masks.push(mask);
            match g.kind() {
                Kind::Sat => {
                    // literal s*x is false iff x = -s, i.e. bit = (s > 0)
                    let mut bad = 0u32;
                    for (j, &v) in g.clause_vars(a).iter().enumerate() {
                        if g.clause_signs(a)[j] > 0 {
                            bad |= 1 << v;
                        }
                    }
                    targets.push(bad);
                }
                Kind::Xorsat => targets.push((g.parity(a) < 0) as u32),
            }
        }
        ClauseMasks { masks, targets, kind: g.kind() }
    }

    fn satisfies(&self, x: u32) -> bool {
        match self.kind {
            Kind::Sat => self
                .masks
                .iter()
                .zip(&self.targets)
                .all(|(&m, &bad)| x & m != bad),
            Kind::Xorsat => self
                .masks
                .iter()
                .zip(&self.targets)
                .all(|(&m, &b)| (x & m).count_ones() & 1 == b),
        }
    }
}

fn check_size(g: &FactorGraph) -> Result<(), BpError> {
    if g.n_vars() > MAX_BRUTE_VARS {
        return Err(BpError::TooLargeForEnumeration { n: g.n_vars(), max: MAX_BRUTE_VARS });
    }
    Ok(())
}

/// Marginals of the uniform measure over solutions conditioned on the set
/// entries of `revealed`.
pub fn brute_force_marginals(
    g: &FactorGraph,
    revealed: &Assignment,
) -> Result<BruteResult, BpError> {
    check_size(g)?;
    let n = g.n_vars();
    let cm = ClauseMasks::new(g);
    let mut fixed_mask = 0u32;
    let mut fixed_bits = 0u32;
    for i in 0..n {
        if revealed.is_set(i) {
            fixed_mask |= 1 << i;
            if revealed.get(i) < 0 {
                fixed_bits |= 1 << i;
            }
        }
    }
    let mut total = 0u64;
    let mut plus = vec![0u64; n];
    for x in 0u32..(1 << n) {
        if x & fixed_mask != fixed_bits || !cm.satisfies(x) {
            continue;
        }
        total += 1;
        for (i, p) in plus.iter_mut().enumerate() {
            *p += (x >> i & 1 == 0) as u64;
        }
    }
    if total == 0 {
        return Ok(BruteResult::ZeroMass);
    }
    Ok(BruteResult::Marginals(
        plus.iter().map(|&p| p as f64 / total as f64).collect(),
    ))
}

/// Marginals of the solution measure reweighted by `exp(sum_i field[i]*x_i)`.
pub fn brute_force_marginals_tilted(
    g: &FactorGraph,
    field: &[f64],
) -> Result<BruteResult, BpError> {
    check_size(g)?;
    let n = g.n_vars();
    assert_eq!(field.len(), n);
    let cm = ClauseMasks::new(g);
    // shift by the maximal exponent so weights stay in [0, 1]
    let shift: f64 = field.iter().map(|f| f.abs()).sum();
    let mut total = 0.0f64;
    let mut plus = vec![0.0f64; n];
    for x in 0u32..(1 << n) {
        if !cm.satisfies(x) {
            continue;
        }
        let mut e = -shift;
        for (i, &f) in field.iter().enumerate() {
            e += if x >> i & 1 == 0 { f } else { -f };
        }
        let w = e.exp();
        total += w;
        for (i, p) in plus.iter_mut().enumerate() {
            if x >> i & 1 == 0 {
                *p += w;
            }
        }
    }
    if total == 0.0 {
        return Ok(BruteResult::ZeroMass);
    }
    Ok(BruteResult::Marginals(plus.iter().map(|&p| p / total).collect()))
}

/// External field of the Gaussian-channel tilt: `sqrt(w)/(1-w) * W_ii * y_i`.
pub fn tilt_field(y: &[f64], omega: f64, w_diag: &[f64]) -> Vec<f64> {
    let coef = omega.sqrt() / (1.0 - omega);
    y.iter().zip(w_diag).map(|(&yi, &wi)| coef * wi * yi).collect()
}

/// All solutions of a small instance, as spin vectors.
pub fn enumerate_solutions(g: &FactorGraph) -> Result<Vec<Vec<i8>>, BpError> {
    check_size(g)?;
    let n = g.n_vars();
    let cm = ClauseMasks::new(g);
    let mut out = Vec::new();
    for x in 0u32..(1 << n) {
        if cm.satisfies(x) {
            out.push((0..n).map(|i| if x >> i & 1 == 0 { 1 } else { -1 }).collect());
        }
    }
    Ok(out)
}
