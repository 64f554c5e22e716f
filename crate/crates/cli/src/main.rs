//! `cspd` — generate random k-SAT/k-XORSAT instances, sample their
//! solutions with BP-denoised diffusions, reproduce the sampling
//! thresholds, and run the experiment sweeps.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure (including a
//! sample that fails to satisfy its instance).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cspd_core::bp::Rounds;
use cspd_core::cavity::{
    alpha_mask_closed_form, build_population_cache, default_t_grid, estimate_alpha_diff,
    estimate_alpha_mask_numeric, popdyn_cavity_ksat, popdyn_xorsat_diff, DiffPopConfig,
    SAT_ALPHA_D_K4, SAT_ALPHA_MASK_K4, XORSAT_THRESHOLDS,
};
use cspd_core::diffusion::{
    continuous_sample, cosine_schedule, discrete_sample, BpDenoiser, BpDenoiserSpec,
    ExactDenoiser, InitPolicy, SampleTrace,
};
use cspd_core::harness::{parse_config, phi, run_sweep, uniformity_test, records_to_csv};
use cspd_core::instance::{
    check_assignment, compute_ordering, gen_planted_sat, gen_random, leaf_removal,
    parse_dimacs, to_dimacs, weight_matrix, xorsat_solve, Assignment, FactorGraph, FreePolicy,
    Kind, OrderingStrategy, WeightStrategy,
};
use cspd_core::rng::{derive_seed, rng_from};

#[derive(Parser)]
#[command(name = "cspd", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Sat,
    Xorsat,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Sat => Kind::Sat,
            KindArg::Xorsat => Kind::Xorsat,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Continuous,
    Discrete,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DenoiserArg {
    Bp,
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InitArg {
    Zero,
    Warm,
    Cavity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderingArg {
    Random,
    ReversedLeaf,
    ReversedDegree,
    MinDeg,
    DynamicMinDeg,
}

impl From<OrderingArg> for OrderingStrategy {
    fn from(o: OrderingArg) -> Self {
        match o {
            OrderingArg::Random => OrderingStrategy::Random,
            OrderingArg::ReversedLeaf => OrderingStrategy::ReversedLeaf,
            OrderingArg::ReversedDegree => OrderingStrategy::ReversedDegree,
            OrderingArg::MinDeg => OrderingStrategy::MinDegSat,
            OrderingArg::DynamicMinDeg => OrderingStrategy::DynamicMinDegSat,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WArg {
    Identity,
    LeafRank,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Biased,
    Uniform,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ThresholdMode {
    Mask,
    Diff,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RecursionArg {
    XorsatDiff,
    SatCavity,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random (or planted-SAT) instance in DIMACS/XNF format.
    Gen(GenArgs),
    /// Solve a XORSAT instance exactly, or check an assignment file.
    Solve(SolveArgs),
    /// Run one diffusion sampler on one instance.
    Sample(SampleArgs),
    /// Run a sweep from a config file.
    Sweep(SweepArgs),
    /// Print or recompute the sampling thresholds.
    Thresholds(ThresholdArgs),
    /// Run a population-dynamics recursion and emit the populations.
    Popdyn(PopdynArgs),
    /// Approximate-uniformity diagnostic for the discrete sampler.
    Uniformity(UniformityArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Clause density; the clause count is round(alpha * n).
    #[arg(long, conflicts_with = "m")]
    alpha: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    /// Plant a uniform solution (SAT only); prints the solution as a comment.
    #[arg(long)]
    planted: bool,
    #[arg(long, env = "CSPD_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(short = 'i', long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "uniform")]
    free_policy: PolicyArg,
    #[arg(long, env = "CSPD_SEED", default_value_t = 0)]
    seed: u64,
    /// Check this assignment file instead of solving.
    #[arg(long)]
    check: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(short = 'i', long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "bp")]
    denoiser: DenoiserArg,
    /// BP rounds per denoiser call; "inf" runs to a fixed point.
    #[arg(long, default_value = "1")]
    r: String,
    #[arg(long, value_enum, default_value = "zero")]
    init: InitArg,
    #[arg(long, value_enum, default_value = "random")]
    ordering: OrderingArg,
    #[arg(long, value_enum, default_value = "identity")]
    w: WArg,
    #[arg(long, default_value_t = 0.55)]
    c0: f64,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 30.0)]
    clip: f64,
    /// Diffusion steps (continuous method).
    #[arg(long, default_value_t = 500)]
    steps: usize,
    #[arg(long, env = "CSPD_SEED", default_value_t = 0)]
    seed: u64,
    /// Population size when --init cavity.
    #[arg(long, default_value_t = 10_000)]
    cavity_pop: usize,
    #[arg(long, default_value_t = 100)]
    cavity_sweeps: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed from the config file.
    #[arg(long, env = "CSPD_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, value_enum, default_value = "table")]
    mode: ThresholdMode,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    pop: usize,
    #[arg(long, default_value_t = 100)]
    sweeps: usize,
    #[arg(long, default_value_t = 0.01)]
    delta0: f64,
    #[arg(long, env = "CSPD_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct PopdynArgs {
    #[arg(long, value_enum)]
    recursion: RecursionArg,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    alpha: f64,
    /// Reveal/noise parameter; defaults to a 21-point grid for xorsat-diff
    /// and to 0.5 for sat-cavity.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pop: usize,
    #[arg(long, default_value_t = 100)]
    sweeps: usize,
    #[arg(long, default_value_t = 1)]
    pool: usize,
    #[arg(long, env = "CSPD_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct UniformityArgs {
    /// Instance file; alternatively generate with --kind/--k/--n/--alpha.
    #[arg(short = 'i', long)]
    instance: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sat")]
    kind: KindArg,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Formulas to average over when generating.
    #[arg(long, default_value_t = 3)]
    formulas: usize,
    /// Samples per formula.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 3)]
    r: u32,
    #[arg(long, value_enum, default_value = "random")]
    ordering: OrderingArg,
    #[arg(long, env = "CSPD_SEED", default_value_t = 0)]
    seed: u64,
    /// Write the per-sample values as CSV.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_rounds(text: &str) -> Result<Rounds> {
    if text == "inf" {
        Ok(Rounds::FixedPoint)
    } else {
        text.parse::<u32>()
            .map(Rounds::Fixed)
            .map_err(|_| anyhow!("--r expects a round count or 'inf', got '{text}'"))
    }
}

fn load_instance(path: &PathBuf) -> Result<FactorGraph> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dimacs(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn assignment_line(x: &Assignment) -> String {
    let mut line = String::from("v");
    for (i, &v) in x.values().iter().enumerate() {
        line.push(' ');
        if v < 0 {
            line.push('-');
        }
        line.push_str(&(i + 1).to_string());
    }
    line.push_str(" 0");
    line
}

fn parse_assignment_line(text: &str, n: usize) -> Result<Assignment> {
    let mut x = Assignment::unset(n);
    for tok in text.split_ascii_whitespace() {
        if tok == "v" || tok == "0" {
            continue;
        }
        let lit: i64 = tok.parse().with_context(|| format!("bad literal '{tok}'"))?;
        if lit == 0 {
            continue;
        }
        let var = lit.unsigned_abs() as usize - 1;
        if var >= n {
            bail!("literal {lit} out of range for n = {n}");
        }
        x.set(var, if lit < 0 { -1 } else { 1 });
    }
    Ok(x)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let m = match (args.alpha, args.m) {
        (Some(a), None) => (a * args.n as f64).round() as usize,
        (None, Some(m)) => m,
        (None, None) => bail!("one of --alpha or --m is required"),
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    let mut rng = rng_from(args.seed, &[]);
    let mut text = String::new();
    if args.planted {
        if args.kind != KindArg::Sat {
            bail!("--planted requires --kind sat");
        }
        let (g, x) = gen_planted_sat(args.n, m, args.k, &mut rng)?;
        text.push_str(&format!("c planted {}\n", assignment_line(&x)));
        text.push_str(&to_dimacs(&g));
    } else {
        let g = gen_random(args.kind.into(), args.n, m, args.k, &mut rng)?;
        text.push_str(&to_dimacs(&g));
    }
    match args.output {
        Some(path) => fs::write(&path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let g = load_instance(&args.instance)?;
    if let Some(check_path) = args.check {
        let text = fs::read_to_string(&check_path)
            .with_context(|| format!("reading {}", check_path.display()))?;
        let x = parse_assignment_line(&text, g.n_vars())?;
        let outcome = check_assignment(&g, &x)?;
        match outcome {
            cspd_core::instance::CheckOutcome::Satisfied => println!("SATISFIED"),
            cspd_core::instance::CheckOutcome::Violated(clauses) => {
                println!("VIOLATED {} clauses: {clauses:?}", clauses.len());
                bail!("assignment does not satisfy the instance");
            }
        }
        return Ok(());
    }
    let policy = match args.free_policy {
        PolicyArg::Biased => FreePolicy::BiasedPlusOne,
        PolicyArg::Uniform => FreePolicy::UniformFree,
    };
    let mut rng = rng_from(args.seed, &[]);
    match xorsat_solve(&g, policy, &mut rng)? {
        Some(x) => {
            println!("{}", assignment_line(&x));
            Ok(())
        }
        None => {
            println!("UNSAT");
            bail!("system is inconsistent over GF(2)");
        }
    }
}

fn run_sample(args: &SampleArgs, g: &FactorGraph) -> Result<SampleTrace> {
    let rounds = parse_rounds(&args.r)?;
    let needs_leaf = args.ordering == OrderingArg::ReversedLeaf || args.w == WArg::LeafRank;
    let leaf = if needs_leaf { Some(leaf_removal(g)) } else { None };
    let mut rng = rng_from(args.seed, &[0x5a]);
    let den_seed = derive_seed(args.seed, &[0xde]);

    let init = match args.init {
        InitArg::Zero => InitPolicy::Zero,
        InitArg::Warm => InitPolicy::Warm,
        InitArg::Cavity => {
            if g.kind() != Kind::Sat || args.method != MethodArg::Discrete {
                bail!("--init cavity requires a SAT instance and --method discrete");
            }
            InitPolicy::Cavity(std::sync::Arc::new(build_population_cache(
                g.k(),
                g.alpha(),
                args.cavity_pop,
                args.cavity_sweeps,
                1,
                args.clip,
                derive_seed(args.seed, &[0xca]),
                0,
            )))
        }
    };
    let spec = BpDenoiserSpec {
        rounds,
        tol: 0.0,
        clip: args.clip,
        epsilon: args.epsilon,
        init,
    };
    let trace = match args.method {
        MethodArg::Continuous => {
            let strategy = match args.w {
                WArg::Identity => WeightStrategy::Identity,
                WArg::LeafRank => WeightStrategy::LeafRank { c0: args.c0 },
            };
            let w = weight_matrix(g, strategy, leaf.as_ref())?;
            let schedule = cosine_schedule(args.steps.max(2));
            match args.denoiser {
                DenoiserArg::Bp => {
                    let mut den = BpDenoiser::new(spec, den_seed);
                    continuous_sample(g, &mut den, &schedule, &w, &mut rng)?
                }
                DenoiserArg::Exact => {
                    let mut den = ExactDenoiser;
                    continuous_sample(g, &mut den, &schedule, &w, &mut rng)?
                }
            }
        }
        MethodArg::Discrete => {
            let plan = compute_ordering(g, args.ordering.into(), leaf.as_ref(), &mut rng)?;
            match args.denoiser {
                DenoiserArg::Bp => {
                    let mut den = BpDenoiser::new(spec, den_seed);
                    discrete_sample(g, &mut den, &plan, &mut rng)?
                }
                DenoiserArg::Exact => {
                    let mut den = ExactDenoiser;
                    discrete_sample(g, &mut den, &plan, &mut rng)?
                }
            }
        }
    };
    Ok(trace)
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let g = load_instance(&args.instance)?;
    let trace = run_sample(&args, &g)?;
    println!("{}", assignment_line(&trace.assignment));
    if !trace.step_logprobs.is_empty() {
        println!("logprob {:.6}", trace.logprob_total());
    }
    println!(
        "status {} violations {} steps {} millis {}",
        if trace.success { "sat" } else { "unsat" },
        trace.violations,
        trace.steps,
        trace.millis
    );
    if !trace.success {
        bail!("sampler did not produce a satisfying assignment");
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    if let Some(output) = args.output {
        cfg.output = Some(output);
    }
    let result = run_sweep(&cfg)?;
    if cfg.output.is_none() {
        print!("{}", records_to_csv(&cfg, &result.records));
    }
    for p in &result.points {
        eprintln!(
            "alpha {:>7.4}  success {:>4}/{:<4} rate {:.3} wilson [{:.3}, {:.3}]",
            p.alpha, p.successes, p.trials, p.rate, p.wilson_low, p.wilson_high
        );
    }
    eprintln!("wall_millis {}", result.wall_millis);
    Ok(())
}

fn cmd_thresholds(args: ThresholdArgs) -> Result<()> {
    match args.mode {
        ThresholdMode::Table => {
            println!("k alpha_mask alpha_diff alpha_d");
            for row in &XORSAT_THRESHOLDS {
                println!(
                    "{} {:.6} {:.3} {:.6}",
                    row.k, row.alpha_mask, row.alpha_diff, row.alpha_d
                );
            }
            println!("sat4 alpha_mask {SAT_ALPHA_MASK_K4:.2} alpha_d {SAT_ALPHA_D_K4:.2}");
        }
        ThresholdMode::Mask => match args.k {
            Some(k) => println!("{:.6}", alpha_mask_closed_form(k)?),
            None => {
                println!("k closed_form numeric");
                for k in 3..=10 {
                    let cf = alpha_mask_closed_form(k)?;
                    let est = estimate_alpha_mask_numeric(k, 1e-4)?;
                    println!("{k} {cf:.6} {est:.6}");
                }
            }
        },
        ThresholdMode::Diff => {
            let k = args.k.ok_or_else(|| anyhow!("--mode diff requires --k"))?;
            let cfg = DiffPopConfig {
                pop_size: args.pop,
                sweeps: args.sweeps,
                pool: 1,
                init_field: 10.0,
                workers: args.workers,
            };
            let grid = default_t_grid();
            let est = estimate_alpha_diff(k, args.delta0, &grid, &cfg, args.seed)?;
            println!("{est:.3}");
        }
    }
    Ok(())
}

fn cmd_popdyn(args: PopdynArgs) -> Result<()> {
    let mut csv = String::from("k,alpha,t,statistic,value,seed\n");
    match args.recursion {
        RecursionArg::XorsatDiff => {
            let grid = match args.t {
                Some(t) => vec![t],
                None => default_t_grid(),
            };
            let cfg = DiffPopConfig {
                pop_size: args.pop,
                sweeps: args.sweeps,
                pool: args.pool,
                init_field: 10.0,
                workers: 0,
            };
            let deltas = popdyn_xorsat_diff(args.k, args.alpha, &grid, &cfg, args.seed);
            for (t, d) in grid.iter().zip(&deltas) {
                csv.push_str(&format!(
                    "{},{},{},delta,{:.8},{}\n",
                    args.k, args.alpha, t, d, args.seed
                ));
            }
        }
        RecursionArg::SatCavity => {
            let t = args.t.unwrap_or(0.5);
            let mut rng = rng_from(args.seed, &[0xca]);
            let (u_pop, h_pop) = popdyn_cavity_ksat(
                args.k,
                args.alpha,
                t,
                args.pop,
                args.sweeps,
                args.pool,
                30.0,
                &mut rng,
            );
            for &u in &u_pop.samples {
                csv.push_str(&format!(
                    "{},{},{},cavity_u,{:.8},{}\n",
                    args.k, args.alpha, t, u, args.seed
                ));
            }
            for &h in &h_pop.samples {
                csv.push_str(&format!(
                    "{},{},{},cavity_h,{:.8},{}\n",
                    args.k, args.alpha, t, h, args.seed
                ));
            }
        }
    }
    match args.output {
        Some(path) => {
            fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_uniformity(args: UniformityArgs) -> Result<()> {
    let graphs: Vec<FactorGraph> = match &args.instance {
        Some(path) => vec![load_instance(path)?],
        None => {
            let m = (args.alpha * args.n as f64).round() as usize;
            (0..args.formulas)
                .map(|i| {
                    let mut rng = rng_from(args.seed, &[0x9e, i as u64]);
                    gen_random(args.kind.into(), args.n, m, args.k, &mut rng)
                        .map_err(Into::into)
                })
                .collect::<Result<_>>()?
        }
    };
    let mut all_values = Vec::new();
    let mut failures = 0usize;
    let mut reference = 0.0;
    for (fi, g) in graphs.iter().enumerate() {
        reference = phi(g.k(), g.alpha());
        let report = uniformity_test(
            g,
            |sample_idx| {
                let mut rng =
                    rng_from(args.seed, &[0x51, fi as u64, sample_idx as u64]);
                let plan =
                    compute_ordering(g, args.ordering.into(), None, &mut rng)?;
                let mut den = BpDenoiser::new(
                    BpDenoiserSpec {
                        rounds: Rounds::Fixed(args.r),
                        ..Default::default()
                    },
                    derive_seed(args.seed, &[0xde, fi as u64, sample_idx as u64]),
                );
                discrete_sample(g, &mut den, &plan, &mut rng)
            },
            args.samples,
        )?;
        match report {
            Some(r) => {
                failures += r.n_failures;
                all_values.extend(r.values);
            }
            None => failures += args.samples,
        }
    }
    if all_values.is_empty() {
        bail!("no successful samples; nothing to report");
    }
    let mean = cspd_core::stats::mean(&all_values);
    let std = cspd_core::stats::pop_std(&all_values);
    println!("samples {} failures {failures}", all_values.len());
    println!("mean {mean:.6} std {std:.6}");
    println!("phi {reference:.6} kl_upper_bound {:.6}", reference - mean);
    if let Some(path) = args.output {
        let mut csv = String::from("sample,value\n");
        for (i, v) in all_values.iter().enumerate() {
            csv.push_str(&format!("{i},{v:.8}\n"));
        }
        fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successful exits; anything else is
            // a usage error and exits 1
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Thresholds(args) => cmd_thresholds(args),
        Command::Popdyn(args) => cmd_popdyn(args),
        Command::Uniformity(args) => cmd_uniformity(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
