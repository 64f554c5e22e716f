//! Seed derivation for reproducible, scheduling-independent randomness.
//!
//! Every unit of work (instance, replicate, population cell) gets its own
//! generator seeded from the master seed and the unit's coordinates, so
//! results never depend on thread count or execution order.

use rand::SeedableRng;

/// The generator used throughout the crate.
pub type Pcg = rand_pcg::Pcg64Mcg;

/// SplitMix64 finalizer; good avalanche for seed mixing.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a sequence of coordinates.
pub fn derive_seed(master: u64, salts: &[u64]) -> u64 {
    let mut state = mix(master);
    for &s in salts {
        state = mix(state ^ mix(s));
    }
    state
}

/// A generator for the given (master, coordinates) pair.
pub fn rng_from(master: u64, salts: &[u64]) -> Pcg {
    Pcg::seed_from_u64(derive_seed(master, salts))
}
