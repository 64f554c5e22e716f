//! Exact XORSAT solving by GF(2) Gaussian elimination on bit-packed rows.

use rand::Rng;

use super::{Assignment, FactorGraph, InstanceError, Kind};

/// How free variables are assigned after elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreePolicy {
    /// Pin every free variable to +1 (biased solutions).
    BiasedPlusOne,
    /// Uniform free bits: the output is exactly uniform over the solution
    /// set, because solutions are in bijection with free assignments.
    UniformFree,
}

struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    fn zero(bits: usize) -> Self {
        BitRow { words: vec![0; bits.div_ceil(64)] }
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    fn xor_assign(&mut self, other: &BitRow) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }
}

/// Solves the parity system. Returns `None` iff the system is inconsistent
/// over GF(2). In the spin encoding, `x_i = (-1)^{z_i}` and a parity of -1
/// corresponds to an odd right-hand side.
pub fn xorsat_solve<R: Rng>(
    g: &FactorGraph,
    policy: FreePolicy,
    rng: &mut R,
) -> Result<Option<Assignment>, InstanceError> {
    if g.kind() != Kind::Xorsat {
        return Err(InstanceError::WrongKind { expected: Kind::Xorsat, got: g.kind() });
    }
    let n = g.n_vars();
    let m = g.n_clauses();
    // augmented rows: n coefficient bits + 1 rhs bit
    let mut rows: Vec<BitRow> = (0..m)
        .map(|a| {
            let mut row = BitRow::zero(n + 1);
            for &v in g.clause_vars(a) {
                row.flip(v as usize);
            }
            if g.parity(a) < 0 {
                row.flip(n);
            }
            row
        })
        .collect();

    // Gauss-Jordan to reduced row echelon form
    let mut pivot_col_of_row = Vec::with_capacity(m);
    let mut rank = 0usize;
    for col in 0..n {
        let Some(pivot) = (rank..m).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (above, rest) = rows.split_at_mut(rank);
        let (prow, below) = rest.split_first_mut().expect("pivot row exists");
        for r in above.iter_mut().chain(below.iter_mut()) {
            if r.get(col) {
                r.xor_assign(prow);
            }
        }
        pivot_col_of_row.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }
    // rows past the rank have all-zero coefficients; rhs 1 means 0 = 1
    if rows[rank..].iter().any(|row| row.get(n)) {
        return Ok(None);
    }

    let mut is_pivot = vec![false; n];
    for &c in &pivot_col_of_row {
        is_pivot[c] = true;
    }
    // z-bits: free variables per policy, pivots by back substitution
    let mut z = vec![false; n];
    for (i, free) in is_pivot.iter().enumerate() {
        if !free {
            z[i] = match policy {
                FreePolicy::BiasedPlusOne => false,
                FreePolicy::UniformFree => rng.gen::<bool>(),
            };
        }
    }
    for (r, &col) in pivot_col_of_row.iter().enumerate() {
        let mut acc = rows[r].get(n);
        for j in (col + 1)..n {
            if rows[r].get(j) && !is_pivot[j] && z[j] {
                acc = !acc;
            }
        }
        z[col] = acc;
    }
    let spins: Vec<i8> = z.iter().map(|&b| if b { -1 } else { 1 }).collect();
    Ok(Some(Assignment::from_spins(spins)?))
}
