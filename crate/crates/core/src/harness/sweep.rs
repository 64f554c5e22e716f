//! Sweep execution. Instances are embarrassingly parallel jobs; every
//! random draw comes from a generator derived from (master seed, point,
//! instance, replicate), so records are identical for any worker count and
//! merge deterministically by job index.

use std::fs;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::cavity::{build_population_cache, PopulationCache};
use crate::diffusion::{
    continuous_sample, cosine_schedule, discrete_sample, BpDenoiser, BpDenoiserSpec,
    ContinuousDenoiser, DiffusionError, DiscreteDenoiser, ExactDenoiser, InitPolicy,
    NoiseSchedule, SampleTrace,
};
use crate::instance::{
    compute_ordering, gen_random, leaf_removal, weight_matrix, FactorGraph, OrderingStrategy,
    WeightStrategy,
};
use crate::rng::{derive_seed, rng_from};
use crate::stats::wilson95;

use super::{DenoiserName, ExperimentConfig, HarnessError, InitName, Method};

/// One (point, instance, replicate) outcome. `logprob` is `None` for the
/// continuous sampler.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub point: usize,
    pub alpha: f64,
    pub instance: usize,
    pub replicate: usize,
    pub seed: u64,
    pub success: bool,
    pub violations: usize,
    pub logprob: Option<f64>,
    pub millis: u64,
}

/// Per-alpha aggregate with a 95% Wilson interval.
#[derive(Debug, Clone, Serialize)]
pub struct PointSummary {
    pub alpha: f64,
    pub successes: usize,
    pub trials: usize,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub mean_logprob: Option<f64>,
    pub mean_millis: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub points: Vec<PointSummary>,
    pub wall_millis: u64,
}

impl SweepResult {
    pub fn success_rate(&self, point: usize) -> f64 {
        self.points[point].rate
    }
}

/// Salts for the independent random streams of a sweep.
mod salt {
    pub const INSTANCE: u64 = 0x11;
    pub const REPLICATE: u64 = 0x22;
    pub const DENOISER: u64 = 0x33;
    pub const CAVITY: u64 = 0x44;
}

fn build_denoiser(
    config: &ExperimentConfig,
    cache: Option<&Arc<PopulationCache>>,
    seed: u64,
) -> Box<dyn DenoiserPair> {
    match config.denoiser {
        DenoiserName::Exact => Box::new(ExactDenoiser),
        DenoiserName::Bp => {
            let init = match config.init {
                InitName::Zero => InitPolicy::Zero,
                InitName::Warm => InitPolicy::Warm,
                InitName::Cavity => InitPolicy::Cavity(
                    cache.expect("cavity cache built for cavity init").clone(),
                ),
            };
            Box::new(BpDenoiser::new(
                BpDenoiserSpec {
                    rounds: config.radius,
                    tol: 0.0,
                    clip: config.clip,
                    epsilon: config.epsilon,
                    init,
                },
                seed,
            ))
        }
    }
}

/// Object-safe union of the two denoiser interfaces.
trait DenoiserPair: ContinuousDenoiser + DiscreteDenoiser {}
impl<T: ContinuousDenoiser + DiscreteDenoiser> DenoiserPair for T {}

struct InstanceJob<'a> {
    config: &'a ExperimentConfig,
    schedule: &'a NoiseSchedule,
    cache: Option<&'a Arc<PopulationCache>>,
    point: usize,
    alpha: f64,
    instance: usize,
}

fn run_instance(job: InstanceJob<'_>) -> Vec<SweepRecord> {
    let config = job.config;
    let m = config.m_at(job.alpha);
    let mut gen_rng =
        rng_from(config.seed, &[salt::INSTANCE, job.point as u64, job.instance as u64]);
    let g = gen_random(config.kind, config.n, m, config.k, &mut gen_rng)
        .expect("validated dimensions");
    let needs_leaf = config.ordering == OrderingStrategy::ReversedLeaf
        || matches!(config.w_strategy, WeightStrategy::LeafRank { .. });
    let leaf = if needs_leaf { Some(leaf_removal(&g)) } else { None };

    (0..config.replicates)
        .map(|replicate| {
            let run_seed = derive_seed(
                config.seed,
                &[salt::REPLICATE, job.point as u64, job.instance as u64, replicate as u64],
            );
            let mut rng = rng_from(run_seed, &[]);
            let den_seed = derive_seed(
                config.seed,
                &[salt::DENOISER, job.point as u64, job.instance as u64, replicate as u64],
            );
            let outcome =
                run_one(config, &g, leaf.as_ref(), job.schedule, job.cache, den_seed, &mut rng);
            let (success, violations, logprob, millis) = match outcome {
                Ok(trace) => (
                    trace.success,
                    trace.violations,
                    match config.method {
                        Method::Discrete => Some(trace.logprob_total()),
                        Method::Continuous => None,
                    },
                    trace.millis,
                ),
                // an unusable ordering or weight plan is a sampler failure
                Err(_) => (false, g.n_clauses(), None, 0),
            };
            SweepRecord {
                point: job.point,
                alpha: job.alpha,
                instance: job.instance,
                replicate,
                seed: run_seed,
                success,
                violations,
                logprob,
                millis,
            }
        })
        .collect()
}

fn run_one(
    config: &ExperimentConfig,
    g: &FactorGraph,
    leaf: Option<&crate::instance::LeafRemovalResult>,
    schedule: &NoiseSchedule,
    cache: Option<&Arc<PopulationCache>>,
    den_seed: u64,
    rng: &mut crate::rng::Pcg,
) -> Result<SampleTrace, DiffusionError> {
    let mut denoiser = build_denoiser(config, cache, den_seed);
    match config.method {
        Method::Continuous => {
            let w = weight_matrix(g, config.w_strategy, leaf)?;
            continuous_sample(g, denoiser.as_mut(), schedule, &w, rng)
        }
        Method::Discrete => {
            let plan = compute_ordering(g, config.ordering, leaf, rng)?;
            discrete_sample(g, denoiser.as_mut(), &plan, rng)
        }
    }
}

/// Runs the full sweep. Generation, sampling and scoring happen per
/// instance; unsatisfiable instances and per-instance sampler errors are
/// recorded as failures and never abort the sweep. When `config.output` is
/// set, writes the records CSV there and a JSON summary alongside.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    config.validate()?;
    let started = Instant::now();
    let schedule = cosine_schedule(config.schedule_l.max(2));
    // one population cache per sweep point when cavity init is requested
    let caches: Vec<Option<Arc<PopulationCache>>> = config
        .alphas
        .iter()
        .enumerate()
        .map(|(point, &alpha)| match config.init {
            InitName::Cavity => Some(Arc::new(build_population_cache(
                config.k,
                alpha,
                config.cavity_pop,
                config.cavity_sweeps,
                1,
                config.clip,
                derive_seed(config.seed, &[salt::CAVITY, point as u64]),
                config.workers,
            ))),
            _ => None,
        })
        .collect();

    let n_jobs = config.alphas.len() * config.formulas;
    let per_instance = crate::exec::map_jobs(n_jobs, config.workers, |idx| {
        let point = idx / config.formulas;
        let instance = idx % config.formulas;
        run_instance(InstanceJob {
            config,
            schedule: &schedule,
            cache: caches[point].as_ref(),
            point,
            alpha: config.alphas[point],
            instance,
        })
    });
    let records: Vec<SweepRecord> = per_instance.into_iter().flatten().collect();

    let points = summarize(&config.alphas, &records);
    let result =
        SweepResult { records, points, wall_millis: started.elapsed().as_millis() as u64 };
    if let Some(path) = &config.output {
        fs::write(path, records_to_csv(config, &result.records))?;
        let summary_path = path.with_extension("summary.json");
        let summary = serde_json::json!({
            "kind": config.kind.to_string(),
            "k": config.k,
            "n": config.n,
            "method": config.method.to_string(),
            "denoiser": config.denoiser.to_string(),
            "radius": config.radius.to_string(),
            "init": config.init.to_string(),
            "ordering": config.ordering.to_string(),
            "w_strategy": config.w_strategy.to_string(),
            "seed": config.seed,
            "wall_millis": result.wall_millis,
            "points": result.points,
        });
        fs::write(summary_path, serde_json::to_string_pretty(&summary)?)?;
    }
    Ok(result)
}

fn summarize(alphas: &[f64], records: &[SweepRecord]) -> Vec<PointSummary> {
    alphas
        .iter()
        .enumerate()
        .map(|(point, &alpha)| {
            let rows: Vec<&SweepRecord> =
                records.iter().filter(|r| r.point == point).collect();
            let trials = rows.len();
            let successes = rows.iter().filter(|r| r.success).count();
            let (lo, hi) = wilson95(successes, trials);
            let logprobs: Vec<f64> = rows.iter().filter_map(|r| r.logprob).collect();
            let mean_logprob = if logprobs.is_empty() {
                None
            } else {
                Some(crate::stats::mean(&logprobs))
            };
            let mean_millis = if trials == 0 {
                0.0
            } else {
                rows.iter().map(|r| r.millis as f64).sum::<f64>() / trials as f64
            };
            PointSummary {
                alpha,
                successes,
                trials,
                rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
                wilson_low: lo,
                wilson_high: hi,
                mean_logprob,
                mean_millis,
            }
        })
        .collect()
}

/// Renders the records CSV. The `millis` column is written as zero so the
/// file is byte-identical across re-runs and worker counts; measured
/// timings live in the JSON summary only.
pub fn records_to_csv(config: &ExperimentConfig, records: &[SweepRecord]) -> String {
    let mut out = String::from(
        "kind,k,n,alpha,method,denoiser,radius,init,ordering,w_strategy,seed,instance,replicate,success,violations,logprob,millis\n",
    );
    for r in records {
        let logprob = match r.logprob {
            Some(lp) => format!("{lp:.6}"),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},0\n",
            config.kind,
            config.k,
            config.n,
            r.alpha,
            config.method,
            config.denoiser,
            config.radius,
            config.init,
            config.ordering,
            config.w_strategy,
            r.seed,
            r.instance,
            r.replicate,
            r.success as u8,
            r.violations,
            logprob,
        ));
    }
    out
}

/// Parses a records CSV back into records (used by the recomputation
/// checks; ignores the constant configuration columns).
pub fn records_from_csv(text: &str) -> Result<Vec<SweepRecord>, HarnessError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let bad = |msg: &str| HarnessError::Config { line: idx + 1, msg: msg.into() };
        if cols.len() != 17 {
            return Err(bad("expected 17 columns"));
        }
        out.push(SweepRecord {
            point: usize::MAX,
            alpha: cols[3].parse().map_err(|_| bad("bad alpha"))?,
            instance: cols[11].parse().map_err(|_| bad("bad instance"))?,
            replicate: cols[12].parse().map_err(|_| bad("bad replicate"))?,
            seed: cols[10].parse().map_err(|_| bad("bad seed"))?,
            success: cols[13] == "1",
            violations: cols[14].parse().map_err(|_| bad("bad violations"))?,
            logprob: if cols[15].is_empty() {
                None
            } else {
                Some(cols[15].parse().map_err(|_| bad("bad logprob"))?)
            },
            millis: cols[16].parse().map_err(|_| bad("bad millis"))?,
        });
    }
    Ok(out)
}
