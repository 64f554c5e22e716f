//! Continuous denoising diffusion: start from white noise and run the
//! reverse recursion with the denoiser's posterior-mean estimate.

use rand::Rng;
use rand_distr::StandardNormal;
use std::time::Instant;

use crate::instance::{Assignment, FactorGraph};

use super::{ContinuousDenoiser, DiffusionError, NoiseSchedule, SampleTrace};

/// Runs the reverse recursion
/// `Y_{l+1} = gamma_l Y_l + delta_l * W (.) m(Y_l; omega_l) + sqrt(beta_l) g_l`
/// from `Y_0 ~ N(0, I)` and decides `sign(Y_L)` (ties to +1).
pub fn continuous_sample<R: Rng>(
    g: &FactorGraph,
    denoiser: &mut dyn ContinuousDenoiser,
    schedule: &NoiseSchedule,
    w_diag: &[f64],
    rng: &mut R,
) -> Result<SampleTrace, DiffusionError> {
    let n = g.n_vars();
    let init: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let mut noise = |_: usize| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    continuous_sample_with_noise(g, denoiser, schedule, w_diag, init, &mut noise)
}

/// Deterministic-noise variant used by equivariance tests: `init` is `Y_0`
/// and `noise(l)` supplies the step-`l` Gaussian vector.
pub fn continuous_sample_with_noise(
    g: &FactorGraph,
    denoiser: &mut dyn ContinuousDenoiser,
    schedule: &NoiseSchedule,
    w_diag: &[f64],
    init: Vec<f64>,
    noise: &mut dyn FnMut(usize) -> Vec<f64>,
) -> Result<SampleTrace, DiffusionError> {
    let n = g.n_vars();
    if w_diag.len() != n {
        return Err(DiffusionError::WeightMismatch { got: w_diag.len(), want: n });
    }
    if init.len() != n {
        return Err(DiffusionError::WeightMismatch { got: init.len(), want: n });
    }
    let started = Instant::now();
    let mut y = init;
    let l_steps = schedule.len();
    for l in 0..l_steps {
        let m = denoiser.magnetizations(g, &y, schedule.omega(l), w_diag)?;
        debug_assert_eq!(m.len(), n);
        let gamma = schedule.gamma(l);
        let delta = schedule.delta(l);
        let sigma = schedule.beta(l).sqrt();
        let g_l = noise(l);
        for i in 0..n {
            y[i] = gamma * y[i] + delta * w_diag[i] * m[i] + sigma * g_l[i];
        }
    }
    let spins: Vec<i8> = y.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect();
    let assignment = Assignment::from_spins(spins).expect("spins are valid");
    Ok(SampleTrace::from_final(
        g,
        assignment,
        Vec::new(),
        l_steps,
        started.elapsed().as_millis() as u64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{cosine_schedule, ExactDenoiser};
    use crate::instance::Kind;
    use crate::rng::rng_from;

    #[test]
    fn zero_clause_graph_always_succeeds() {
        let g = FactorGraph::new_xorsat(6, 3, &[]).unwrap();
        let schedule = cosine_schedule(50);
        let w = vec![1.0; 6];
        let mut rng = rng_from(1, &[]);
        for _ in 0..20 {
            let mut den = ExactDenoiser;
            let t = continuous_sample(&g, &mut den, &schedule, &w, &mut rng).unwrap();
            assert!(t.success);
            assert_eq!(t.steps, 50);
        }
    }

    #[test]
    fn single_free_variable_is_unbiased() {
        // n = 1, no clauses: P(x = +1) must be 1/2 within 3 sigma of 1e4 runs
        let g = FactorGraph::new_sat(1, 1, &[]).unwrap();
        let schedule = cosine_schedule(40);
        let w = vec![1.0];
        let mut rng = rng_from(99, &[]);
        let runs = 10_000;
        let mut plus = 0usize;
        for _ in 0..runs {
            let mut den = ExactDenoiser;
            let t = continuous_sample(&g, &mut den, &schedule, &w, &mut rng).unwrap();
            plus += (t.assignment.get(0) > 0) as usize;
        }
        let p = plus as f64 / runs as f64;
        let sigma = 0.5 / (runs as f64).sqrt();
        assert!((p - 0.5).abs() <= 3.0 * sigma, "p = {p}");
    }

    #[test]
    fn exact_denoiser_solves_low_density_xorsat() {
        // sanity anchor: k=4, alpha <= 0.4, n <= 10, W = I, exact denoiser
        let mut ok = 0;
        let total = 40;
        for seed in 0..total {
            let mut rng = rng_from(7000, &[seed]);
            let g = crate::instance::gen_random(Kind::Xorsat, 10, 4, 4, &mut rng).unwrap();
            let schedule = cosine_schedule(500);
            let w = vec![1.0; 10];
            let mut den = ExactDenoiser;
            let t = continuous_sample(&g, &mut den, &schedule, &w, &mut rng).unwrap();
            ok += t.success as usize;
        }
        assert!(ok as f64 / total as f64 >= 0.95, "success {ok}/{total}");
    }

    #[test]
    fn relabeling_equivariance() {
        // permuting variables, clauses and the noise stream permutes outputs
        let clauses = vec![(vec![0, 1, 2], 1i8), (vec![1, 2, 3], -1)];
        let g = FactorGraph::new_xorsat(5, 3, &clauses).unwrap();
        let perm: Vec<usize> = vec![3, 0, 4, 1, 2]; // image of each variable
        let permuted: Vec<(Vec<u32>, i8)> = vec![
            (vec![perm[0] as u32, perm[1] as u32, perm[2] as u32], 1),
            (vec![perm[1] as u32, perm[2] as u32, perm[3] as u32], -1),
        ];
        let g2 = FactorGraph::new_xorsat(5, 3, &permuted).unwrap();

        let schedule = cosine_schedule(60);
        let w = vec![1.0; 5];
        let mut base_rng = rng_from(5, &[]);
        let steps: Vec<Vec<f64>> = (0..=60)
            .map(|_| {
                (0..5)
                    .map(|_| rand::Rng::sample::<f64, _>(&mut base_rng, rand_distr::StandardNormal))
                    .collect()
            })
            .collect();
        let apply_perm = |v: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; 5];
            for (i, &x) in v.iter().enumerate() {
                out[perm[i]] = x;
            }
            out
        };

        let mut den = ExactDenoiser;
        let mut idx = 0usize;
        let mut noise1 = |_: usize| {
            idx += 1;
            steps[idx].clone()
        };
        let t1 = continuous_sample_with_noise(
            &g,
            &mut den,
            &schedule,
            &w,
            steps[0].clone(),
            &mut noise1,
        )
        .unwrap();

        let mut den = ExactDenoiser;
        let mut idx2 = 0usize;
        let mut noise2 = |_: usize| {
            idx2 += 1;
            apply_perm(&steps[idx2])
        };
        let t2 = continuous_sample_with_noise(
            &g2,
            &mut den,
            &schedule,
            &w,
            apply_perm(&steps[0]),
            &mut noise2,
        )
        .unwrap();

        for i in 0..5 {
            assert_eq!(t1.assignment.get(i), t2.assignment.get(perm[i]));
        }
    }
}
