//! k-SAT / k-XORSAT instances: generation, validation, structure analysis,
//! exact XORSAT solving and text serialization.

mod gen;
mod io;
mod leaf;
mod ordering;
mod xorsolve;

pub use gen::{gen_planted_sat, gen_random};
pub use io::{parse_dimacs, to_dimacs, ParseError};
pub use leaf::{leaf_removal, LeafRemovalResult};
pub use ordering::{
    compute_ordering, dynamic_next_variable, leaf_ranks, weight_matrix, weights_from_ranks,
    OrderingPlan, OrderingStrategy, WeightStrategy,
};
pub use xorsolve::{xorsat_solve, FreePolicy};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which constraint family an instance belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// Disjunctive clauses over signed literals.
    Sat,
    /// Parity constraints: the product of the member spins equals the clause sign.
    Xorsat,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kind::Sat => write!(f, "sat"),
            Kind::Xorsat => write!(f, "xorsat"),
        }
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid arity: k={k} with n={n} variables")]
    InvalidArity { k: usize, n: usize },
    #[error("clause {clause} has arity {got}, expected {want}")]
    WrongArity { clause: usize, got: usize, want: usize },
    #[error("clause {clause} references variable {var} out of range (n={n})")]
    VariableOutOfRange { clause: usize, var: u32, n: usize },
    #[error("clause {clause} repeats variable {var}")]
    RepeatedVariable { clause: usize, var: u32 },
    #[error("expected a {expected} instance, got {got}")]
    WrongKind { expected: Kind, got: Kind },
    #[error("assignment length {got} does not match n={want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("assignment contains unset variables")]
    UnsetVariables,
    #[error("spin value {0} is not one of -1, 0, +1")]
    BadSpin(i8),
    #[error("reversed-leaf ordering requires a leaf removal that emptied the graph")]
    LeafRemovalIncomplete,
    #[error("no unset variable to select")]
    NoUnsetVariable,
    #[error("logit vector length {got} does not match n={want}")]
    LogitLengthMismatch { got: usize, want: usize },
}

/// A spin configuration, possibly partial. Entries are `+1`, `-1` or
/// [`Assignment::UNSET`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<i8>,
}

impl Assignment {
    pub const UNSET: i8 = 0;

    /// All-unset configuration of length `n`.
    pub fn unset(n: usize) -> Self {
        Assignment { values: vec![Self::UNSET; n] }
    }

    /// Builds from raw spins, checking every entry is -1, 0 or +1.
    pub fn from_spins(values: Vec<i8>) -> Result<Self, InstanceError> {
        for &v in &values {
            if !(-1..=1).contains(&v) {
                return Err(InstanceError::BadSpin(v));
            }
        }
        Ok(Assignment { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.values[i]
    }

    pub fn set(&mut self, i: usize, v: i8) {
        debug_assert!((-1..=1).contains(&v));
        self.values[i] = v;
    }

    pub fn is_set(&self, i: usize) -> bool {
        self.values[i] != Self::UNSET
    }

    pub fn n_set(&self) -> usize {
        self.values.iter().filter(|&&v| v != Self::UNSET).count()
    }

    pub fn is_fully_set(&self) -> bool {
        self.values.iter().all(|&v| v != Self::UNSET)
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }
}

/// Outcome of checking an assignment against every clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Satisfied,
    /// Indices of the violated clauses, in increasing order.
    Violated(Vec<usize>),
}

impl CheckOutcome {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, CheckOutcome::Satisfied)
    }

    pub fn n_violated(&self) -> usize {
        match self {
            CheckOutcome::Satisfied => 0,
            CheckOutcome::Violated(v) => v.len(),
        }
    }
}

/// An immutable k-CSP instance in flat CSR-like layout.
///
/// Clause `a` occupies positions `a*k .. (a+1)*k` of the edge arrays; the
/// directed edge id `a*k + j` identifies the pair (clause `a`, its `j`-th
/// member variable). `var_edges`/`var_offsets` hold the transposed adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorGraph {
    kind: Kind,
    k: usize,
    n_vars: usize,
    clause_vars: Vec<u32>,
    sat_signs: Vec<i8>,
    parities: Vec<i8>,
    var_edges: Vec<u32>,
    var_offsets: Vec<u32>,
}

impl FactorGraph {
    /// Builds a SAT instance from `(variables, signs)` clauses.
    pub fn new_sat(
        n_vars: usize,
        k: usize,
        clauses: &[(Vec<u32>, Vec<i8>)],
    ) -> Result<Self, InstanceError> {
        let mut clause_vars = Vec::with_capacity(clauses.len() * k);
        let mut sat_signs = Vec::with_capacity(clauses.len() * k);
        for (a, (vars, signs)) in clauses.iter().enumerate() {
            if signs.len() != vars.len() {
                return Err(InstanceError::WrongArity { clause: a, got: signs.len(), want: vars.len() });
            }
            clause_vars.extend_from_slice(vars);
            sat_signs.extend_from_slice(signs);
        }
        Self::build(Kind::Sat, n_vars, k, clauses.len(), clause_vars, sat_signs, Vec::new())
    }

    /// Builds a XORSAT instance from `(variables, parity)` clauses.
    pub fn new_xorsat(
        n_vars: usize,
        k: usize,
        clauses: &[(Vec<u32>, i8)],
    ) -> Result<Self, InstanceError> {
        let mut clause_vars = Vec::with_capacity(clauses.len() * k);
        let mut parities = Vec::with_capacity(clauses.len());
        for (vars, parity) in clauses {
            clause_vars.extend_from_slice(vars);
            parities.push(*parity);
        }
        Self::build(Kind::Xorsat, n_vars, k, clauses.len(), clause_vars, Vec::new(), parities)
    }

    fn build(
        kind: Kind,
        n_vars: usize,
        k: usize,
        m: usize,
        clause_vars: Vec<u32>,
        sat_signs: Vec<i8>,
        parities: Vec<i8>,
    ) -> Result<Self, InstanceError> {
        if k == 0 || k > n_vars {
            return Err(InstanceError::InvalidArity { k, n: n_vars });
        }
        if clause_vars.len() != m * k {
            return Err(InstanceError::WrongArity {
                clause: clause_vars.len() / k.max(1),
                got: clause_vars.len() % k,
                want: k,
            });
        }
        let mut seen = vec![u32::MAX; n_vars];
        for a in 0..m {
            for j in 0..k {
                let v = clause_vars[a * k + j];
                if v as usize >= n_vars {
                    return Err(InstanceError::VariableOutOfRange { clause: a, var: v, n: n_vars });
                }
                if seen[v as usize] == a as u32 {
                    return Err(InstanceError::RepeatedVariable { clause: a, var: v });
                }
                seen[v as usize] = a as u32;
            }
        }
        // transpose: bucket the directed edges by variable
        let mut var_offsets = vec![0u32; n_vars + 1];
        for &v in &clause_vars {
            var_offsets[v as usize + 1] += 1;
        }
        for i in 0..n_vars {
            var_offsets[i + 1] += var_offsets[i];
        }
        let mut cursor = var_offsets.clone();
        let mut var_edges = vec![0u32; clause_vars.len()];
        for (e, &v) in clause_vars.iter().enumerate() {
            var_edges[cursor[v as usize] as usize] = e as u32;
            cursor[v as usize] += 1;
        }
        Ok(FactorGraph { kind, k, n_vars, clause_vars, sat_signs, parities, var_edges, var_offsets })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_clauses(&self) -> usize {
        if self.k == 0 { 0 } else { self.clause_vars.len() / self.k }
    }

    /// Clause density M/N.
    pub fn alpha(&self) -> f64 {
        self.n_clauses() as f64 / self.n_vars as f64
    }

    pub fn n_edges(&self) -> usize {
        self.clause_vars.len()
    }

    /// Member variables of clause `a`.
    pub fn clause_vars(&self, a: usize) -> &[u32] {
        &self.clause_vars[a * self.k..(a + 1) * self.k]
    }

    /// SAT literal signs of clause `a`.
    pub fn clause_signs(&self, a: usize) -> &[i8] {
        debug_assert_eq!(self.kind, Kind::Sat);
        &self.sat_signs[a * self.k..(a + 1) * self.k]
    }

    /// XOR parity of clause `a`.
    pub fn parity(&self, a: usize) -> i8 {
        debug_assert_eq!(self.kind, Kind::Xorsat);
        self.parities[a]
    }

    /// Directed-edge ids incident to variable `i`.
    pub fn var_edges(&self, i: usize) -> &[u32] {
        &self.var_edges[self.var_offsets[i] as usize..self.var_offsets[i + 1] as usize]
    }

    pub fn var_degree(&self, i: usize) -> usize {
        (self.var_offsets[i + 1] - self.var_offsets[i]) as usize
    }

    pub fn edge_clause(&self, e: u32) -> usize {
        e as usize / self.k
    }

    pub fn edge_var(&self, e: u32) -> u32 {
        self.clause_vars[e as usize]
    }

    /// SAT sign attached to a directed edge.
    pub fn edge_sign(&self, e: u32) -> i8 {
        debug_assert_eq!(self.kind, Kind::Sat);
        self.sat_signs[e as usize]
    }

    /// Positive/negative occurrence counts of variable `i` (SAT).
    pub fn signed_degrees(&self, i: usize) -> (usize, usize) {
        debug_assert_eq!(self.kind, Kind::Sat);
        let mut pos = 0;
        let mut neg = 0;
        for &e in self.var_edges(i) {
            if self.sat_signs[e as usize] > 0 {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        (pos, neg)
    }

    /// Checks one clause against a fully set assignment.
    pub fn clause_satisfied(&self, a: usize, x: &Assignment) -> bool {
        match self.kind {
            Kind::Sat => {
                let vars = self.clause_vars(a);
                let signs = self.clause_signs(a);
                vars.iter().zip(signs).any(|(&v, &s)| s == x.get(v as usize))
            }
            Kind::Xorsat => {
                let mut prod = 1i8;
                for &v in self.clause_vars(a) {
                    prod *= x.get(v as usize);
                }
                prod == self.parities[a]
            }
        }
    }
}

/// Evaluates a fully set assignment against every clause, returning the
/// exact set of violated clause indices.
pub fn check_assignment(g: &FactorGraph, x: &Assignment) -> Result<CheckOutcome, InstanceError> {
    if x.len() != g.n_vars() {
        return Err(InstanceError::LengthMismatch { got: x.len(), want: g.n_vars() });
    }
    if !x.is_fully_set() {
        return Err(InstanceError::UnsetVariables);
    }
    let violated: Vec<usize> =
        (0..g.n_clauses()).filter(|&a| !g.clause_satisfied(a, x)).collect();
    if violated.is_empty() {
        Ok(CheckOutcome::Satisfied)
    } else {
        Ok(CheckOutcome::Violated(violated))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sat1() -> FactorGraph {
        // (x1 v x2 v x3), all positive
        FactorGraph::new_sat(3, 3, &[(vec![0, 1, 2], vec![1, 1, 1])]).unwrap()
    }

    #[test]
    fn adjacency_is_transpose_of_clauses() {
        let g = FactorGraph::new_xorsat(5, 3, &[(vec![0, 2, 4], 1), (vec![1, 2, 3], -1)]).unwrap();
        for i in 0..g.n_vars() {
            for &e in g.var_edges(i) {
                assert_eq!(g.edge_var(e) as usize, i);
            }
        }
        let total: usize = (0..g.n_vars()).map(|i| g.var_degree(i)).sum();
        assert_eq!(total, g.n_edges());
        assert_eq!(g.var_degree(2), 2);
        assert_eq!(g.var_degree(0), 1);
    }

    #[test]
    fn rejects_repeated_variable_and_out_of_range() {
        let err = FactorGraph::new_xorsat(4, 3, &[(vec![1, 1, 2], 1)]).unwrap_err();
        assert!(matches!(err, InstanceError::RepeatedVariable { .. }));
        let err = FactorGraph::new_xorsat(3, 3, &[(vec![0, 1, 3], 1)]).unwrap_err();
        assert!(matches!(err, InstanceError::VariableOutOfRange { .. }));
        let err = FactorGraph::new_xorsat(2, 3, &[]).unwrap_err();
        assert!(matches!(err, InstanceError::InvalidArity { .. }));
    }

    #[test]
    fn check_all_literals_false_is_violated() {
        let g = sat1();
        let x = Assignment::from_spins(vec![-1, -1, -1]).unwrap();
        assert_eq!(check_assignment(&g, &x).unwrap(), CheckOutcome::Violated(vec![0]));
        let x = Assignment::from_spins(vec![-1, -1, 1]).unwrap();
        assert!(check_assignment(&g, &x).unwrap().is_satisfied());
    }

    #[test]
    fn check_xor_product() {
        let g = FactorGraph::new_xorsat(3, 3, &[(vec![0, 1, 2], 1)]).unwrap();
        let x = Assignment::from_spins(vec![1, 1, 1]).unwrap();
        assert!(check_assignment(&g, &x).unwrap().is_satisfied());
        let x = Assignment::from_spins(vec![1, 1, -1]).unwrap();
        assert_eq!(check_assignment(&g, &x).unwrap().n_violated(), 1);
    }

    #[test]
    fn check_rejects_unset() {
        let g = sat1();
        let x = Assignment::unset(3);
        assert!(matches!(check_assignment(&g, &x), Err(InstanceError::UnsetVariables)));
    }
}
