//! Random and planted instance generation.

use rand::seq::index::sample;
use rand::Rng;

use super::{Assignment, FactorGraph, InstanceError, Kind};

fn check_params(n: usize, k: usize) -> Result<(), InstanceError> {
    if k < 2 || k > n {
        return Err(InstanceError::InvalidArity { k, n });
    }
    Ok(())
}

/// Draws `m` clauses independently: a uniform k-subset of variables per
/// clause, i.i.d. uniform literal signs (SAT) or a uniform parity (XORSAT).
/// Duplicate clauses are permitted; variables within a clause are distinct.
pub fn gen_random<R: Rng>(
    kind: Kind,
    n: usize,
    m: usize,
    k: usize,
    rng: &mut R,
) -> Result<FactorGraph, InstanceError> {
    check_params(n, k)?;
    match kind {
        Kind::Sat => {
            let clauses: Vec<(Vec<u32>, Vec<i8>)> = (0..m)
                .map(|_| {
                    let vars: Vec<u32> = sample(rng, n, k).iter().map(|v| v as u32).collect();
                    let signs: Vec<i8> =
                        (0..k).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
                    (vars, signs)
                })
                .collect();
            FactorGraph::new_sat(n, k, &clauses)
        }
        Kind::Xorsat => {
            let clauses: Vec<(Vec<u32>, i8)> = (0..m)
                .map(|_| {
                    let vars: Vec<u32> = sample(rng, n, k).iter().map(|v| v as u32).collect();
                    (vars, if rng.gen::<bool>() { 1 } else { -1 })
                })
                .collect();
            FactorGraph::new_xorsat(n, k, &clauses)
        }
    }
}

/// Plants a uniform assignment and draws clauses conditioned on it being a
/// solution: per clause the sign pattern is uniform over the `2^k - 1`
/// patterns that do not falsify the planted assignment.
pub fn gen_planted_sat<R: Rng>(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut R,
) -> Result<(FactorGraph, Assignment), InstanceError> {
    check_params(n, k)?;
    let planted: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let vars: Vec<u32> = sample(rng, n, k).iter().map(|v| v as u32).collect();
        // rejection over the unique all-falsifying pattern keeps the
        // admissible patterns exactly uniform
        let signs: Vec<i8> = loop {
            let signs: Vec<i8> =
                (0..k).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            let falsifies_planted =
                vars.iter().zip(&signs).all(|(&v, &s)| s != planted[v as usize]);
            if !falsifies_planted {
                break signs;
            }
        };
        clauses.push((vars, signs));
    }
    let g = FactorGraph::new_sat(n, k, &clauses)?;
    let x = Assignment::from_spins(planted)?;
    Ok((g, x))
}
