//! Internal helpers shared by unit, integration and acceptance tests.
//! Not part of the public API surface.

use rand::Rng;

use crate::instance::{FactorGraph, Kind};

/// A random tree-shaped factor graph: the first clause takes `k` fresh
/// variables, every later clause hooks one uniformly chosen existing
/// variable to `k - 1` fresh ones. BP is exact on these.
pub fn random_tree_graph<R: Rng>(
    kind: Kind,
    k: usize,
    n_clauses: usize,
    rng: &mut R,
) -> FactorGraph {
    assert!(n_clauses >= 1);
    let n_vars = k + (n_clauses - 1) * (k - 1);
    let mut used = k;
    let mut clause_vars: Vec<Vec<u32>> = vec![(0..k as u32).collect()];
    for _ in 1..n_clauses {
        let anchor = rng.gen_range(0..used) as u32;
        let mut vars = vec![anchor];
        for _ in 0..k - 1 {
            vars.push(used as u32);
            used += 1;
        }
        clause_vars.push(vars);
    }
    match kind {
        Kind::Sat => {
            let clauses: Vec<(Vec<u32>, Vec<i8>)> = clause_vars
                .into_iter()
                .map(|vars| {
                    let signs =
                        (0..k).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
                    (vars, signs)
                })
                .collect();
            FactorGraph::new_sat(n_vars, k, &clauses).unwrap()
        }
        Kind::Xorsat => {
            let clauses: Vec<(Vec<u32>, i8)> = clause_vars
                .into_iter()
                .map(|vars| (vars, if rng.gen::<bool>() { 1 } else { -1 }))
                .collect();
            FactorGraph::new_xorsat(n_vars, k, &clauses).unwrap()
        }
    }
}
