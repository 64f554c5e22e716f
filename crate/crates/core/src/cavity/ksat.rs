//! Cavity-field populations for SAT BP initialization.
//!
//! The clause-side population update draws k-1 incoming fields, replacing
//! each independently by a hard `±clip` pin with probability t/2 apiece
//! (a revealed neighbor seen through a uniform literal sign); the
//! variable-side update sums two Poisson(k*alpha/2) batches of clause
//! messages with opposite signs. Field distributions are symmetric, so
//! literal signs are absorbed into the update.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::bp::{BpError, LOG_FLOOR};
use crate::exec::map_jobs;
use crate::instance::{Assignment, FactorGraph};
use crate::rng::rng_from;

use super::Population;

/// SAT clause map on drawn cavity fields.
fn sat_clause_map(fields: &[f64], k: usize) -> f64 {
    let prod: f64 = fields.iter().map(|h| 1.0 - h.tanh()).product();
    let arg = (1.0 - 0.5f64.powi(k as i32 - 1) * prod).max(LOG_FLOOR);
    -0.5 * arg.ln()
}

/// Runs the population dynamics at reveal fraction `t`, returning the
/// clause-message population and the variable-field population (in that
/// order). With `pool > 1` the last `pool` generations are concatenated.
#[allow(clippy::too_many_arguments)]
pub fn popdyn_cavity_ksat<R: Rng>(
    k: usize,
    alpha: f64,
    t: f64,
    pop_size: usize,
    sweeps: usize,
    pool: usize,
    clip: f64,
    rng: &mut R,
) -> (Population, Population) {
    assert!(k >= 2 && pop_size > 0);
    assert!((0.0..=1.0).contains(&t));
    let n = pop_size;
    let mut h_pop = vec![0.0f64; n];
    let mut u_pop = vec![0.0f64; n];
    let poisson = if k as f64 * alpha > 0.0 {
        Some(Poisson::new(k as f64 * alpha / 2.0).expect("positive mean"))
    } else {
        None
    };
    let mut drawn = vec![0.0f64; k - 1];
    let pool = pool.max(1);
    let total_sweeps = sweeps + pool - 1;
    let mut pooled_u = Vec::with_capacity(n * pool);
    let mut pooled_h = Vec::with_capacity(n * pool);
    for sweep in 1..=total_sweeps {
        for i in 0..n {
            for d in drawn.iter_mut() {
                let r = rng.gen::<f64>();
                *d = if r < t / 2.0 {
                    clip
                } else if r < t {
                    -clip
                } else {
                    h_pop[rng.gen_range(0..n)]
                };
            }
            u_pop[i] = sat_clause_map(&drawn, k);
        }
        for i in 0..n {
            let (m_plus, m_minus) = match &poisson {
                Some(p) => (p.sample(rng) as usize, p.sample(rng) as usize),
                None => (0, 0),
            };
            let mut acc = 0.0;
            for _ in 0..m_plus {
                acc += u_pop[rng.gen_range(0..n)];
            }
            for _ in 0..m_minus {
                acc -= u_pop[rng.gen_range(0..n)];
            }
            h_pop[i] = acc.clamp(-clip, clip);
        }
        if sweep + pool > total_sweeps {
            pooled_u.extend_from_slice(&u_pop);
            pooled_h.extend_from_slice(&h_pop);
        }
    }
    if pooled_u.is_empty() {
        // zero sweeps requested: hand back the initial generation
        pooled_u = u_pop;
        pooled_h = h_pop;
    }
    (
        Population { samples: pooled_u, k, alpha, t, sweeps },
        Population { samples: pooled_h, k, alpha, t, sweeps },
    )
}

/// Initial variable-to-clause fields for one BP run: revealed variables pin
/// their outgoing edges at `±clip`, unrevealed edges draw i.i.d. from the
/// population.
pub fn cavity_init_messages<R: Rng>(
    g: &FactorGraph,
    population: &Population,
    revealed: &Assignment,
    clip: f64,
    rng: &mut R,
) -> Result<Vec<f64>, BpError> {
    if population.is_empty() {
        return Err(BpError::EmptyPopulation);
    }
    if revealed.len() != g.n_vars() {
        return Err(BpError::LengthMismatch { got: revealed.len(), want: g.n_vars() });
    }
    let samples = &population.samples;
    let mut fields = Vec::with_capacity(g.n_edges());
    for e in 0..g.n_edges() as u32 {
        let i = g.edge_var(e) as usize;
        fields.push(if revealed.is_set(i) {
            revealed.get(i) as f64 * clip
        } else {
            samples[rng.gen_range(0..samples.len())]
        });
    }
    Ok(fields)
}

/// Variable-field populations precomputed on a reveal-fraction grid, looked
/// up by nearest neighbor while a sampler runs.
#[derive(Debug, Clone)]
pub struct PopulationCache {
    pub k: usize,
    pub alpha: f64,
    entries: Vec<Population>,
}

impl PopulationCache {
    /// Wraps externally built populations.
    pub fn from_entries(k: usize, alpha: f64, entries: Vec<Population>) -> Self {
        assert!(!entries.is_empty());
        PopulationCache { k, alpha, entries }
    }

    /// The population whose `t` is closest to the query.
    pub fn nearest(&self, t: f64) -> &Population {
        self.entries
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .expect("cache is nonempty")
    }

    pub fn entries(&self) -> &[Population] {
        &self.entries
    }
}

/// Builds the standard cache at t = 0.00, 0.05, ..., 1.00. Cells run
/// concurrently with derived seeds.
#[allow(clippy::too_many_arguments)]
pub fn build_population_cache(
    k: usize,
    alpha: f64,
    pop_size: usize,
    sweeps: usize,
    pool: usize,
    clip: f64,
    seed: u64,
    workers: usize,
) -> PopulationCache {
    let ts: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    let entries = map_jobs(ts.len(), workers, |cell| {
        let mut rng = rng_from(seed, &[0xca11, k as u64, alpha.to_bits(), cell as u64]);
        let (_, h_pop) =
            popdyn_cavity_ksat(k, alpha, ts[cell], pop_size, sweeps, pool, clip, &mut rng);
        h_pop
    });
    PopulationCache::from_entries(k, alpha, entries)
}
