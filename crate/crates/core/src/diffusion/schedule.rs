//! Noise schedules for the continuous sampler.
//!
//! `omega[l]` is the signal fraction remaining at step `l`, increasing from
//! near zero to exactly one at `l = L`; `beta`, `gamma`, `delta` are the
//! per-step coefficients of the reverse update
//! `Y_{l+1} = gamma_l Y_l + delta_l W m + sqrt(beta_l) g`.

/// Coefficients for an `L`-step reverse diffusion.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    beta: Vec<f64>,
    omega: Vec<f64>,
    gamma: Vec<f64>,
    delta: Vec<f64>,
}

impl NoiseSchedule {
    /// Derives all coefficients from step sizes, each in (0, 1). The stored
    /// `omega` are the exact suffix products `prod_{i>=l} (1 - beta_i)`.
    pub fn from_betas(beta: Vec<f64>) -> Self {
        let l_steps = beta.len();
        assert!(l_steps >= 1, "schedule needs at least one step");
        assert!(beta.iter().all(|&b| b > 0.0 && b < 1.0), "beta must lie in (0, 1)");
        let mut omega = vec![1.0; l_steps + 1];
        for l in (0..l_steps).rev() {
            omega[l] = omega[l + 1] * (1.0 - beta[l]);
        }
        let mut gamma = Vec::with_capacity(l_steps);
        let mut delta = Vec::with_capacity(l_steps);
        for l in 0..l_steps {
            let b = beta[l];
            let w = omega[l];
            gamma.push((1.0 - b / (1.0 - w)) / (1.0 - b).sqrt());
            delta.push(b * w.sqrt() / ((1.0 - w) * (1.0 - b).sqrt()));
        }
        NoiseSchedule { beta, omega, gamma, delta }
    }

    /// Number of reverse steps L.
    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn beta(&self, l: usize) -> f64 {
        self.beta[l]
    }

    /// Signal fraction at step `l`, `l` in `0..=L`; `omega(L) == 1` exactly.
    pub fn omega(&self, l: usize) -> f64 {
        self.omega[l]
    }

    pub fn gamma(&self, l: usize) -> f64 {
        self.gamma[l]
    }

    pub fn delta(&self, l: usize) -> f64 {
        self.delta[l]
    }

    pub fn betas(&self) -> &[f64] {
        &self.beta
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omega
    }
}

/// The raw cosine signal curve at normalized time `t`, scaled so the value
/// at `t = 1` is exactly one. Uses the usual 0.008 offset.
pub fn cosine_signal(t: f64) -> f64 {
    const OFFSET: f64 = 0.008;
    let f = |t: f64| {
        let angle = ((1.0 - t) + OFFSET) / (1.0 + OFFSET) * std::f64::consts::FRAC_PI_2;
        angle.cos().powi(2)
    };
    f(t) / f(1.0)
}

/// Cosine schedule with `l_steps >= 2` steps: step sizes come from
/// consecutive signal ratios and are clipped to `(1e-5, 0.999)`; the stored
/// `omega` are recomputed from the clipped steps so the suffix-product
/// identity holds exactly.
pub fn cosine_schedule(l_steps: usize) -> NoiseSchedule {
    assert!(l_steps >= 2, "cosine schedule needs at least two steps");
    let raw: Vec<f64> =
        (0..=l_steps).map(|l| cosine_signal(l as f64 / l_steps as f64)).collect();
    let beta: Vec<f64> =
        (0..l_steps).map(|l| (1.0 - raw[l] / raw[l + 1]).clamp(1e-5, 0.999)).collect();
    NoiseSchedule::from_betas(beta)
}
