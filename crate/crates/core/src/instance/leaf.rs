//! Leaf removal: iteratively strip degree-1 variables with their unique
//! clause. Succeeds (all clauses removed) exactly when the 2-core is empty.

use std::collections::BTreeSet;

use super::FactorGraph;

/// Result of running leaf removal to completion or until it halts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafRemovalResult {
    /// `(variable, clause)` pairs in removal order.
    pub visit_order: Vec<(u32, u32)>,
    /// True iff every clause was removed.
    pub success: bool,
    /// Variables still attached to at least one surviving clause (the 2-core),
    /// in increasing order. Empty on success.
    pub core_vars: Vec<u32>,
}

impl LeafRemovalResult {
    /// Variables never visited and not in the core: isolated from the start
    /// or freed when their last clause was removed.
    pub fn free_vars(&self, n_vars: usize) -> Vec<u32> {
        let mut visited = vec![false; n_vars];
        for &(v, _) in &self.visit_order {
            visited[v as usize] = true;
        }
        for &v in &self.core_vars {
            visited[v as usize] = true;
        }
        (0..n_vars as u32).filter(|&v| !visited[v as usize]).collect()
    }
}

/// Runs leaf removal with a deterministic tie-break: among degree-1
/// variables, the lowest index is removed first.
pub fn leaf_removal(g: &FactorGraph) -> LeafRemovalResult {
    let n = g.n_vars();
    let m = g.n_clauses();
    let mut degree: Vec<u32> = (0..n).map(|i| g.var_degree(i) as u32).collect();
    let mut clause_alive = vec![true; m];
    let mut leaves: BTreeSet<u32> =
        (0..n as u32).filter(|&v| degree[v as usize] == 1).collect();
    let mut visit_order = Vec::new();

    while let Some(v) = leaves.pop_first() {
        // unique surviving clause of v
        let clause = g
            .var_edges(v as usize)
            .iter()
            .map(|&e| g.edge_clause(e))
            .find(|&a| clause_alive[a])
            .expect("degree-1 variable must have a live clause");
        clause_alive[clause] = false;
        visit_order.push((v, clause as u32));
        degree[v as usize] = 0;
        for &w in g.clause_vars(clause) {
            if w == v {
                continue;
            }
            let d = &mut degree[w as usize];
            *d -= 1;
            match *d {
                1 => {
                    leaves.insert(w);
                }
                0 => {
                    leaves.remove(&w);
                }
                _ => {}
            }
        }
    }

    let success = visit_order.len() == m;
    let core_vars: Vec<u32> = (0..n as u32).filter(|&v| degree[v as usize] >= 1).collect();
    LeafRemovalResult { visit_order, success, core_vars }
}
