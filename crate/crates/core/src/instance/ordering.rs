//! Variable orderings for masked diffusion and the rank-based weight matrix
//! for continuous diffusion.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Assignment, FactorGraph, InstanceError, Kind, LeafRemovalResult};

/// How the masked sampler picks the next variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum OrderingStrategy {
    /// Uniform random permutation.
    Random,
    /// Free variables first (shuffled among themselves), then visited
    /// variables in reverse leaf-removal order.
    ReversedLeaf,
    /// Decreasing degree, random tie-break (XORSAT heuristic).
    ReversedDegree,
    /// Decreasing min(deg+, deg-), random tie-break (SAT heuristic).
    MinDegSat,
    /// Recomputes min-degree on the reduced formula at every step; ties
    /// broken by the magnitude of the denoiser logit.
    DynamicMinDegSat,
}

impl std::fmt::Display for OrderingStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OrderingStrategy::Random => "random",
            OrderingStrategy::ReversedLeaf => "reversed-leaf",
            OrderingStrategy::ReversedDegree => "reversed-degree",
            OrderingStrategy::MinDegSat => "min-deg",
            OrderingStrategy::DynamicMinDegSat => "dynamic-min-deg",
        };
        write!(f, "{s}")
    }
}

/// A sampling order: either a precomputed permutation (`permutation[step]`
/// is the variable revealed at that step) or a dynamic marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingPlan {
    pub strategy: OrderingStrategy,
    pub permutation: Option<Vec<u32>>,
}

impl OrderingPlan {
    pub fn is_dynamic(&self) -> bool {
        self.permutation.is_none()
    }
}

fn shuffled_indices<R: Rng>(n: usize, rng: &mut R) -> Vec<u32> {
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);
    order
}

/// Builds the sampling order for a static strategy, or marks the plan
/// dynamic. `ReversedLeaf` requires a successful `leaf` result.
pub fn compute_ordering<R: Rng>(
    g: &FactorGraph,
    strategy: OrderingStrategy,
    leaf: Option<&LeafRemovalResult>,
    rng: &mut R,
) -> Result<OrderingPlan, InstanceError> {
    let n = g.n_vars();
    let permutation = match strategy {
        OrderingStrategy::Random => Some(shuffled_indices(n, rng)),
        OrderingStrategy::ReversedLeaf => {
            let leaf = leaf.ok_or(InstanceError::LeafRemovalIncomplete)?;
            if !leaf.success {
                return Err(InstanceError::LeafRemovalIncomplete);
            }
            let mut order = leaf.free_vars(n);
            order.shuffle(rng);
            order.extend(leaf.visit_order.iter().rev().map(|&(v, _)| v));
            Some(order)
        }
        OrderingStrategy::ReversedDegree => {
            let mut order = shuffled_indices(n, rng);
            order.sort_by_key(|&v| std::cmp::Reverse(g.var_degree(v as usize)));
            Some(order)
        }
        OrderingStrategy::MinDegSat => {
            if g.kind() != Kind::Sat {
                return Err(InstanceError::WrongKind { expected: Kind::Sat, got: g.kind() });
            }
            let mut order = shuffled_indices(n, rng);
            order.sort_by_key(|&v| {
                let (pos, neg) = g.signed_degrees(v as usize);
                std::cmp::Reverse(pos.min(neg))
            });
            Some(order)
        }
        OrderingStrategy::DynamicMinDegSat => {
            if g.kind() != Kind::Sat {
                return Err(InstanceError::WrongKind { expected: Kind::Sat, got: g.kind() });
            }
            None
        }
    };
    Ok(OrderingPlan { strategy, permutation })
}

/// Selects the next variable for the dynamic reverse-min-degree order:
/// among unset variables with maximal min-degree on the reduced formula
/// (clauses already satisfied by set variables dropped), the one with the
/// largest |logit|; remaining ties go to the lowest index.
pub fn dynamic_next_variable(
    g: &FactorGraph,
    assigned: &Assignment,
    logits: &[f64],
) -> Result<u32, InstanceError> {
    if g.kind() != Kind::Sat {
        return Err(InstanceError::WrongKind { expected: Kind::Sat, got: g.kind() });
    }
    if assigned.len() != g.n_vars() {
        return Err(InstanceError::LengthMismatch { got: assigned.len(), want: g.n_vars() });
    }
    if logits.len() != g.n_vars() {
        return Err(InstanceError::LogitLengthMismatch { got: logits.len(), want: g.n_vars() });
    }
    if assigned.is_fully_set() {
        return Err(InstanceError::NoUnsetVariable);
    }
    let mut pos = vec![0u32; g.n_vars()];
    let mut neg = vec![0u32; g.n_vars()];
    for a in 0..g.n_clauses() {
        let satisfied = g
            .clause_vars(a)
            .iter()
            .zip(g.clause_signs(a))
            .any(|(&v, &s)| assigned.get(v as usize) == s);
        if satisfied {
            continue;
        }
        for (&v, &s) in g.clause_vars(a).iter().zip(g.clause_signs(a)) {
            if !assigned.is_set(v as usize) {
                if s > 0 {
                    pos[v as usize] += 1;
                } else {
                    neg[v as usize] += 1;
                }
            }
        }
    }
    let mut best: Option<(u32, f64, u32)> = None; // (deg_min, |logit|, var)
    for v in 0..g.n_vars() as u32 {
        if assigned.is_set(v as usize) {
            continue;
        }
        let d = pos[v as usize].min(neg[v as usize]);
        let l = logits[v as usize].abs();
        let better = match best {
            None => true,
            Some((bd, bl, _)) => d > bd || (d == bd && l > bl),
        };
        if better {
            best = Some((d, l, v));
        }
    }
    Ok(best.expect("at least one unset variable").2)
}

/// Weighting scheme for the continuous diffusion update.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum WeightStrategy {
    Identity,
    /// Rank-based weights from the leaf-removal order.
    LeafRank { c0: f64 },
}

impl std::fmt::Display for WeightStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightStrategy::Identity => write!(f, "identity"),
            WeightStrategy::LeafRank { .. } => write!(f, "leaf-rank"),
        }
    }
}

/// Ranks used by [`weight_matrix`]: variable `v` visited j-th by leaf
/// removal has rank `j` (1-based); never-visited variables rank above all
/// visited ones, in increasing index order.
///
/// A larger rank means the variable is resolved later by leaf removal, so
/// the diffusion should commit to it earlier; free variables carry the
/// largest weights of all.
pub fn leaf_ranks(g: &FactorGraph, leaf: &LeafRemovalResult) -> Vec<f64> {
    let n = g.n_vars();
    let mut ranks = vec![0.0f64; n];
    for (j, &(v, _)) in leaf.visit_order.iter().enumerate() {
        ranks[v as usize] = (j + 1) as f64;
    }
    let mut next = leaf.visit_order.len() + 1;
    for v in 0..n {
        if ranks[v] == 0.0 {
            ranks[v] = next as f64;
            next += 1;
        }
    }
    ranks
}

/// Standardizes ranks and maps them to diagonal weights
/// `1 + c0 * (rank - mean) / std` (population std), clamped to at least 0.05.
pub fn weights_from_ranks(ranks: &[f64], c0: f64) -> Vec<f64> {
    let m = crate::stats::mean(ranks);
    let sd = crate::stats::pop_std(ranks);
    if sd == 0.0 {
        return vec![1.0; ranks.len()];
    }
    ranks.iter().map(|&r| (1.0 + c0 * (r - m) / sd).max(0.05)).collect()
}

/// Diagonal weight matrix for the continuous sampler. `LeafRank` requires
/// a successful leaf removal.
pub fn weight_matrix(
    g: &FactorGraph,
    strategy: WeightStrategy,
    leaf: Option<&LeafRemovalResult>,
) -> Result<Vec<f64>, InstanceError> {
    match strategy {
        WeightStrategy::Identity => Ok(vec![1.0; g.n_vars()]),
        WeightStrategy::LeafRank { c0 } => {
            let leaf = leaf.ok_or(InstanceError::LeafRemovalIncomplete)?;
            if !leaf.success {
                return Err(InstanceError::LeafRemovalIncomplete);
            }
            Ok(weights_from_ranks(&leaf_ranks(g, leaf), c0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_random, leaf_removal};
    use crate::rng::rng_from;

    #[test]
    fn reversed_leaf_places_removed_variable_last() {
        // single clause on {0,1,2}, n=4: leaf removal visits var 0; the
        // order must be some shuffle of {1,2,3} followed by 0.
        let g = FactorGraph::new_xorsat(4, 3, &[(vec![0, 1, 2], 1)]).unwrap();
        let leaf = leaf_removal(&g);
        for seed in 0..20 {
            let plan = compute_ordering(
                &g,
                OrderingStrategy::ReversedLeaf,
                Some(&leaf),
                &mut rng_from(seed, &[]),
            )
            .unwrap();
            let perm = plan.permutation.unwrap();
            assert_eq!(perm[3], 0);
            let mut head: Vec<u32> = perm[..3].to_vec();
            head.sort_unstable();
            assert_eq!(head, vec![1, 2, 3]);
        }
    }

    #[test]
    fn reversed_leaf_rejects_failed_removal() {
        let clauses = vec![(vec![0, 1, 2], 1), (vec![0, 1, 2], -1), (vec![0, 1, 2], 1)];
        let g = FactorGraph::new_xorsat(3, 3, &clauses).unwrap();
        let leaf = leaf_removal(&g);
        let mut rng = rng_from(0, &[]);
        assert!(matches!(
            compute_ordering(&g, OrderingStrategy::ReversedLeaf, Some(&leaf), &mut rng),
            Err(InstanceError::LeafRemovalIncomplete)
        ));
    }

    #[test]
    fn min_deg_sat_prefers_balanced_variable() {
        // var 0: deg+=3, deg-=0 (deg_min 0); var 1: deg+=2, deg-=2 (deg_min 2)
        let clauses = vec![
            (vec![0, 1, 2], vec![1, 1, 1]),
            (vec![0, 1, 3], vec![1, 1, 1]),
            (vec![0, 1, 4], vec![1, -1, 1]),
            (vec![1, 2, 3], vec![-1, 1, 1]),
        ];
        let g = FactorGraph::new_sat(5, 3, &clauses).unwrap();
        let plan =
            compute_ordering(&g, OrderingStrategy::MinDegSat, None, &mut rng_from(1, &[]))
                .unwrap();
        let perm = plan.permutation.unwrap();
        let pos_of = |v: u32| perm.iter().position(|&x| x == v).unwrap();
        assert!(pos_of(1) < pos_of(0));
    }

    #[test]
    fn permutations_are_bijections() {
        let mut rng = rng_from(9, &[]);
        for trial in 0..1000 {
            let kind = if trial % 2 == 0 { Kind::Sat } else { Kind::Xorsat };
            let g = gen_random(kind, 20, 12, 3, &mut rng).unwrap();
            let leaf = leaf_removal(&g);
            let strategies: Vec<OrderingStrategy> = match kind {
                Kind::Sat => vec![OrderingStrategy::Random, OrderingStrategy::MinDegSat],
                Kind::Xorsat => {
                    let mut s = vec![OrderingStrategy::Random, OrderingStrategy::ReversedDegree];
                    if leaf.success {
                        s.push(OrderingStrategy::ReversedLeaf);
                    }
                    s
                }
            };
            for strategy in strategies {
                let plan = compute_ordering(&g, strategy, Some(&leaf), &mut rng).unwrap();
                let mut seen = vec![false; g.n_vars()];
                for &v in plan.permutation.as_ref().unwrap() {
                    assert!(!seen[v as usize]);
                    seen[v as usize] = true;
                }
                assert!(seen.iter().all(|&b| b));
                if strategy == OrderingStrategy::ReversedLeaf {
                    // every visited variable comes after every free variable
                    let perm = plan.permutation.as_ref().unwrap();
                    let free = leaf.free_vars(g.n_vars());
                    let first_visited = perm
                        .iter()
                        .position(|v| !free.contains(v))
                        .unwrap_or(perm.len());
                    for (idx, v) in perm.iter().enumerate() {
                        if free.contains(v) {
                            assert!(idx < first_visited || free.len() == perm.len());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dynamic_tie_break_chain() {
        // fresh instance, all logits zero: lowest index among the max
        // reduced-min-degree set.
        let clauses = vec![(vec![0, 1, 2], vec![1, -1, 1]), (vec![0, 1, 3], vec![-1, 1, 1])];
        let g = FactorGraph::new_sat(4, 3, &clauses).unwrap();
        let x = Assignment::unset(4);
        // deg_min: var0 = min(1,1)=1, var1 = min(1,1)=1, var2 = 0, var3 = 0
        let v = dynamic_next_variable(&g, &x, &[0.0; 4]).unwrap();
        assert_eq!(v, 0);
        // equal deg_min, second variable has larger |logit|
        let v = dynamic_next_variable(&g, &x, &[0.1, -0.9, 0.0, 0.0]).unwrap();
        assert_eq!(v, 1);
    }

    #[test]
    fn dynamic_deprioritizes_variable_with_no_live_clause() {
        // three clauses, all containing var 0 positively; assigning x1=+1
        // satisfies clauses 0 and 1, x2=+1 satisfies clause 2: var 0 ends
        // with min-degree 0 and loses to var 3 which keeps a live clause.
        let clauses = vec![
            (vec![0, 1, 3], vec![1, 1, -1]),
            (vec![0, 1, 4], vec![1, 1, 1]),
            (vec![0, 2, 3], vec![1, 1, -1]),
            (vec![3, 4, 5], vec![1, -1, 1]),
            (vec![3, 4, 5], vec![-1, 1, 1]),
        ];
        let g = FactorGraph::new_sat(6, 3, &clauses).unwrap();
        let mut x = Assignment::unset(6);
        x.set(1, 1);
        x.set(2, 1);
        let v = dynamic_next_variable(&g, &x, &[0.0; 6]).unwrap();
        assert_ne!(v, 0);
        assert_eq!(v, 3); // deg_min(3) = min(1,2) = 1 on the reduced formula
        let err = dynamic_next_variable(
            &g,
            &Assignment::from_spins(vec![1; 6]).unwrap(),
            &[0.0; 6],
        );
        assert!(matches!(err, Err(InstanceError::NoUnsetVariable)));
    }

    #[test]
    fn identity_weights_are_all_ones() {
        let g = gen_random(Kind::Xorsat, 17, 9, 3, &mut rng_from(2, &[])).unwrap();
        assert_eq!(weight_matrix(&g, WeightStrategy::Identity, None).unwrap(), vec![1.0; 17]);
    }

    #[test]
    fn weights_from_ranks_match_direct_formula() {
        let w = weights_from_ranks(&[1.0, 2.0, 3.0], 0.55);
        assert!((w[0] - 0.326_390_320_734_626).abs() < 1e-12, "{w:?}");
        assert!((w[1] - 1.0).abs() < 1e-12);
        assert!((w[2] - 1.673_609_679_265_374).abs() < 1e-12);
    }

    #[test]
    fn weights_center_on_one_before_clamping() {
        let mut rng = rng_from(8, &[]);
        for _ in 0..20 {
            let g = gen_random(Kind::Xorsat, 40, 20, 3, &mut rng).unwrap();
            let leaf = leaf_removal(&g);
            if !leaf.success {
                continue;
            }
            // c0 small enough that the clamp never fires
            let w = weight_matrix(&g, WeightStrategy::LeafRank { c0: 0.2 }, Some(&leaf)).unwrap();
            let mean = crate::stats::mean(&w);
            assert!((mean - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_std_gives_unit_weights() {
        assert_eq!(weights_from_ranks(&[5.0], 0.55), vec![1.0]);
    }
}
