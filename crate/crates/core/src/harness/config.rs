//! Flat key-value experiment configuration.
//!
//! Format: one `key = value` pair per line, `#` comments, keys mirroring
//! [`ExperimentConfig`] field names. `alphas` takes a comma-separated list;
//! `radius` accepts an integer or `inf`.

use std::path::PathBuf;

use serde::Serialize;

use crate::bp::Rounds;
use crate::instance::{Kind, OrderingStrategy, WeightStrategy};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Continuous,
    Discrete,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Continuous => write!(f, "continuous"),
            Method::Discrete => write!(f, "discrete"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DenoiserName {
    Bp,
    Exact,
}

impl std::fmt::Display for DenoiserName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DenoiserName::Bp => write!(f, "bp"),
            DenoiserName::Exact => write!(f, "exact"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InitName {
    Zero,
    Warm,
    Cavity,
}

impl std::fmt::Display for InitName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitName::Zero => write!(f, "zero"),
            InitName::Warm => write!(f, "warm"),
            InitName::Cavity => write!(f, "cavity"),
        }
    }
}

/// Everything a sweep needs; together with the seed it fully determines
/// the run, independent of worker count.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub k: usize,
    pub n: usize,
    pub alphas: Vec<f64>,
    pub method: Method,
    pub denoiser: DenoiserName,
    pub radius: Rounds,
    pub init: InitName,
    pub epsilon: f64,
    pub clip: f64,
    pub ordering: OrderingStrategy,
    pub w_strategy: WeightStrategy,
    pub schedule_l: usize,
    pub formulas: usize,
    pub replicates: usize,
    pub seed: u64,
    pub workers: usize,
    pub output: Option<PathBuf>,
    /// Population size and sweep count for cavity initialization.
    pub cavity_pop: usize,
    pub cavity_sweeps: usize,
}

impl ExperimentConfig {
    /// Baseline configuration; callers override what they need.
    pub fn new(kind: Kind, k: usize, n: usize, alphas: Vec<f64>, method: Method) -> Self {
        ExperimentConfig {
            kind,
            k,
            n,
            alphas,
            method,
            denoiser: DenoiserName::Bp,
            radius: Rounds::Fixed(1),
            init: InitName::Zero,
            epsilon: 0.0,
            clip: crate::bp::DEFAULT_CLIP,
            ordering: OrderingStrategy::Random,
            w_strategy: WeightStrategy::Identity,
            schedule_l: 500,
            formulas: 100,
            replicates: 1,
            seed: 0,
            workers: 0,
            output: None,
            cavity_pop: 10_000,
            cavity_sweeps: 100,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |key: &str, msg: &str| {
            Err(HarnessError::BadValue { key: key.into(), msg: msg.into() })
        };
        if self.k < 2 {
            return bad("k", "clause size must be at least 2");
        }
        if self.n < self.k {
            return bad("n", "need at least k variables");
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|&a| a < 0.0) {
            return bad("alphas", "need a nonempty list of nonnegative densities");
        }
        if self.formulas == 0 || self.replicates == 0 {
            return bad("formulas", "formulas and replicates must be at least 1");
        }
        if self.schedule_l < 2 {
            return bad("schedule_l", "continuous schedule needs at least 2 steps");
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return bad("epsilon", "relaxation must lie in [0, 1)");
        }
        if self.init == InitName::Cavity
            && (self.method != Method::Discrete || self.kind != Kind::Sat)
        {
            return bad("init", "cavity initialization requires discrete SAT");
        }
        if self.ordering == OrderingStrategy::MinDegSat
            || self.ordering == OrderingStrategy::DynamicMinDegSat
        {
            if self.kind != Kind::Sat {
                return bad("ordering", "min-degree orderings require SAT");
            }
        }
        Ok(())
    }

    /// Clause count at density `alpha`.
    pub fn m_at(&self, alpha: f64) -> usize {
        (alpha * self.n as f64).round() as usize
    }
}

/// Parses the flat key-value format. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut kind = None;
    let mut cfg = ExperimentConfig::new(Kind::Sat, 3, 10, vec![1.0], Method::Discrete);
    let mut seen_k = false;
    let mut seen_n = false;
    let mut seen_alphas = false;
    let mut seen_method = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(HarnessError::Config {
                line: line_no,
                msg: format!("expected 'key = value', got '{line}'"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let bad = |msg: String| HarnessError::Config { line: line_no, msg };
        match key {
            "kind" => {
                kind = Some(match value {
                    "sat" => Kind::Sat,
                    "xorsat" => Kind::Xorsat,
                    other => return Err(bad(format!("unknown kind '{other}'"))),
                })
            }
            "k" => {
                cfg.k = value.parse().map_err(|_| bad(format!("bad k '{value}'")))?;
                seen_k = true;
            }
            "n" => {
                cfg.n = value.parse().map_err(|_| bad(format!("bad n '{value}'")))?;
                seen_n = true;
            }
            "alphas" => {
                cfg.alphas = value
                    .split(',')
                    .map(|tok| tok.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad(format!("bad alpha list '{value}'")))?;
                seen_alphas = true;
            }
            "method" => {
                cfg.method = match value {
                    "continuous" => Method::Continuous,
                    "discrete" => Method::Discrete,
                    other => return Err(bad(format!("unknown method '{other}'"))),
                };
                seen_method = true;
            }
            "denoiser" => {
                cfg.denoiser = match value {
                    "bp" => DenoiserName::Bp,
                    "exact" => DenoiserName::Exact,
                    other => return Err(bad(format!("unknown denoiser '{other}'"))),
                }
            }
            "radius" => {
                cfg.radius = if value == "inf" {
                    Rounds::FixedPoint
                } else {
                    Rounds::Fixed(
                        value.parse().map_err(|_| bad(format!("bad radius '{value}'")))?,
                    )
                }
            }
            "init" => {
                cfg.init = match value {
                    "zero" => InitName::Zero,
                    "warm" => InitName::Warm,
                    "cavity" => InitName::Cavity,
                    other => return Err(bad(format!("unknown init '{other}'"))),
                }
            }
            "epsilon" => {
                cfg.epsilon =
                    value.parse().map_err(|_| bad(format!("bad epsilon '{value}'")))?
            }
            "clip" => {
                cfg.clip = value.parse().map_err(|_| bad(format!("bad clip '{value}'")))?
            }
            "ordering" => {
                cfg.ordering = match value {
                    "random" => OrderingStrategy::Random,
                    "reversed-leaf" => OrderingStrategy::ReversedLeaf,
                    "reversed-degree" => OrderingStrategy::ReversedDegree,
                    "min-deg" => OrderingStrategy::MinDegSat,
                    "dynamic-min-deg" => OrderingStrategy::DynamicMinDegSat,
                    other => return Err(bad(format!("unknown ordering '{other}'"))),
                }
            }
            "w_strategy" => {
                cfg.w_strategy = match value {
                    "identity" => WeightStrategy::Identity,
                    "leaf-rank" => WeightStrategy::LeafRank { c0: 0.55 },
                    other => return Err(bad(format!("unknown w_strategy '{other}'"))),
                }
            }
            "c0" => {
                let c0 = value.parse().map_err(|_| bad(format!("bad c0 '{value}'")))?;
                cfg.w_strategy = match cfg.w_strategy {
                    WeightStrategy::Identity => WeightStrategy::Identity,
                    WeightStrategy::LeafRank { .. } => WeightStrategy::LeafRank { c0 },
                };
            }
            "schedule_l" => {
                cfg.schedule_l =
                    value.parse().map_err(|_| bad(format!("bad schedule_l '{value}'")))?
            }
            "formulas" => {
                cfg.formulas =
                    value.parse().map_err(|_| bad(format!("bad formulas '{value}'")))?
            }
            "replicates" => {
                cfg.replicates =
                    value.parse().map_err(|_| bad(format!("bad replicates '{value}'")))?
            }
            "seed" => {
                cfg.seed = value.parse().map_err(|_| bad(format!("bad seed '{value}'")))?
            }
            "workers" => {
                cfg.workers =
                    value.parse().map_err(|_| bad(format!("bad workers '{value}'")))?
            }
            "output" => cfg.output = Some(PathBuf::from(value)),
            "cavity_pop" => {
                cfg.cavity_pop =
                    value.parse().map_err(|_| bad(format!("bad cavity_pop '{value}'")))?
            }
            "cavity_sweeps" => {
                cfg.cavity_sweeps =
                    value.parse().map_err(|_| bad(format!("bad cavity_sweeps '{value}'")))?
            }
            other => {
                return Err(bad(format!("unknown key '{other}'")));
            }
        }
    }
    cfg.kind = kind.ok_or(HarnessError::MissingKey("kind".into()))?;
    if !seen_k {
        return Err(HarnessError::MissingKey("k".into()));
    }
    if !seen_n {
        return Err(HarnessError::MissingKey("n".into()));
    }
    if !seen_alphas {
        return Err(HarnessError::MissingKey("alphas".into()));
    }
    if !seen_method {
        return Err(HarnessError::MissingKey("method".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}
