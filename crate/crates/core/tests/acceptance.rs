//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Tolerances and counts are pinned here; the suite is deterministic
//! given the seeds baked into each test.

use std::time::Instant;

use cspd_core::bp::{
    brute_force_marginals, brute_force_marginals_tilted, sat_bp_continuous, sat_bp_discrete,
    tilt_field, xorsat_bp_continuous, xorsat_bp_discrete, BpConfig, Rounds,
};
use cspd_core::cavity::{
    alpha_mask_closed_form, default_t_grid, estimate_alpha_diff, estimate_alpha_mask_numeric,
    DiffPopConfig, XORSAT_THRESHOLDS,
};
use cspd_core::diffusion::{discrete_sample, BpDenoiser, BpDenoiserSpec};
use cspd_core::harness::{
    phi, records_to_csv, run_sweep, uniformity_test, ExperimentConfig, InitName, Method,
};
use cspd_core::instance::{
    compute_ordering, gen_random, leaf_removal, xorsat_solve, Assignment, FreePolicy, Kind,
    OrderingStrategy,
};
use cspd_core::rng::{derive_seed, rng_from};
use cspd_core::stats::{chisq_uniform_test, one_sided_proportion_test, pop_std};
use cspd_core::testkit::random_tree_graph;
use rand::Rng;

fn report(criterion: usize, name: &str, pass: bool, detail: String) {
    println!(
        "ACCEPTANCE {criterion} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} {name}: {detail}");
}

/// Criterion 1: the closed form reproduces the reference table to all
/// printed digits, the numeric estimator agrees within 1e-3, and the whole
/// computation stays under a second.
#[test]
fn criterion_1_threshold_table() {
    let started = Instant::now();
    let mut worst_table: f64 = 0.0;
    let mut worst_numeric: f64 = 0.0;
    for row in &XORSAT_THRESHOLDS {
        let cf = alpha_mask_closed_form(row.k).unwrap();
        worst_table = worst_table.max((cf - row.alpha_mask).abs());
        let est = estimate_alpha_mask_numeric(row.k, 1e-4).unwrap();
        worst_numeric = worst_numeric.max((est - cf).abs());
    }
    let elapsed = started.elapsed();
    let pass = worst_table < 5e-7 && worst_numeric < 1e-3 && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        "threshold-table",
        pass,
        format!(
            "closed-form vs table {worst_table:.2e}, numeric vs closed-form {worst_numeric:.2e}, {:.3}s",
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 2: the two-population estimate of the continuous-diffusion
/// threshold for 4-XORSAT lands within 0.05 of the reference 0.632, with
/// population size 10^4, 100 sweeps and the default 21-point grid.
#[test]
fn criterion_2_alpha_diff() {
    let started = Instant::now();
    let cfg = DiffPopConfig {
        pop_size: 10_000,
        sweeps: 100,
        pool: 1,
        init_field: 10.0,
        workers: 1,
    };
    let grid = default_t_grid();
    assert_eq!(grid.len(), 21);
    let est = estimate_alpha_diff(4, 0.01, &grid, &cfg, 1).unwrap();
    let elapsed = started.elapsed();
    let pass = (0.582..=0.682).contains(&est) && elapsed.as_secs_f64() < 600.0;
    report(
        2,
        "alpha-diff",
        pass,
        format!("estimate {est:.3} (reference 0.632), {:.0}s single-threaded", elapsed.as_secs_f64()),
    );
}

/// Criterion 3: on 200 random tree-shaped instances per variant, every BP
/// denoiser matches exhaustive enumeration within 1e-6.
#[test]
fn criterion_3_bp_enumeration_oracle() {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0usize;

    // SAT discrete: random consistent partial reveals
    let mut rng = rng_from(0xACC3, &[0]);
    for trial in 0..200u64 {
        let g = random_tree_graph(Kind::Sat, 3, 1 + (trial % 6) as usize, &mut rng);
        let sols = cspd_core::bp::enumerate_solutions(&g).unwrap();
        let mut revealed = Assignment::unset(g.n_vars());
        if !sols.is_empty() && trial % 2 == 0 {
            let sol = &sols[trial as usize % sols.len()];
            for i in 0..g.n_vars() {
                if rng.gen::<f64>() < 0.3 {
                    revealed.set(i, sol[i]);
                }
            }
        }
        let Some(exact) = brute_force_marginals(&g, &revealed)
            .unwrap()
            .marginals()
            .map(<[f64]>::to_vec)
        else {
            continue;
        };
        let cfg = BpConfig::with_rounds(Rounds::Fixed(2 * g.n_clauses() as u32 + 2));
        let out = sat_bp_discrete(&g, &revealed, cfg).unwrap();
        for (p, q) in out.p_plus().iter().zip(&exact) {
            worst = worst.max((p - q).abs());
        }
        cases += 1;
    }

    // SAT continuous: random observation and signal fraction
    let mut rng = rng_from(0xACC3, &[1]);
    for trial in 0..200u64 {
        let g = random_tree_graph(Kind::Sat, 3, 1 + (trial % 6) as usize, &mut rng);
        let n = g.n_vars();
        let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
        let omega = 0.2 + 0.6 * rng.gen::<f64>();
        let w = vec![1.0; n];
        let exact = brute_force_marginals_tilted(&g, &tilt_field(&y, omega, &w))
            .unwrap()
            .marginals()
            .map(<[f64]>::to_vec)
            .expect("tilted tree measure has mass");
        let cfg = BpConfig::with_rounds(Rounds::Fixed(2 * g.n_clauses() as u32 + 2));
        let out = sat_bp_continuous(&g, &y, omega, &w, cfg).unwrap();
        for (m, q) in out.magnetizations().iter().zip(&exact) {
            worst = worst.max((m - (2.0 * q - 1.0)).abs() / 2.0);
        }
        cases += 1;
    }

    // XORSAT discrete: reveals drawn from an exact solution
    let mut rng = rng_from(0xACC3, &[2]);
    for trial in 0..200u64 {
        let g = random_tree_graph(Kind::Xorsat, 3, 1 + (trial % 6) as usize, &mut rng);
        let sol = xorsat_solve(&g, FreePolicy::UniformFree, &mut rng).unwrap().unwrap();
        let mut revealed = Assignment::unset(g.n_vars());
        for i in 0..g.n_vars() {
            if rng.gen::<f64>() < 0.4 {
                revealed.set(i, sol.get(i));
            }
        }
        let exact = brute_force_marginals(&g, &revealed)
            .unwrap()
            .marginals()
            .map(<[f64]>::to_vec)
            .expect("consistent reveal");
        let out =
            xorsat_bp_discrete(&g, &revealed, BpConfig::with_rounds(Rounds::FixedPoint))
                .unwrap();
        for (h, q) in out.fields.iter().zip(&exact) {
            let p = 0.5 * (1.0 + h.tanh());
            worst = worst.max((p - q).abs());
        }
        cases += 1;
    }

    // XORSAT continuous: random observation and field scale
    let mut rng = rng_from(0xACC3, &[3]);
    for trial in 0..200u64 {
        let g = random_tree_graph(Kind::Xorsat, 3, 1 + (trial % 6) as usize, &mut rng);
        let n = g.n_vars();
        let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 3.0 - 1.5).collect();
        let lambda = rng.gen::<f64>() * 2.0;
        let field: Vec<f64> = y.iter().map(|&v| lambda * v).collect();
        let exact = brute_force_marginals_tilted(&g, &field)
            .unwrap()
            .marginals()
            .map(<[f64]>::to_vec)
            .expect("tilted tree measure has mass");
        let cfg = BpConfig::with_rounds(Rounds::Fixed(2 * g.n_clauses() as u32 + 2));
        let out = xorsat_bp_continuous(&g, &y, lambda, cfg).unwrap();
        for (m, q) in out.magnetizations().iter().zip(&exact) {
            worst = worst.max((m - (2.0 * q - 1.0)).abs() / 2.0);
        }
        cases += 1;
    }

    let elapsed = started.elapsed();
    let pass = worst < 1e-6 && cases >= 780 && elapsed.as_secs_f64() < 120.0;
    report(
        3,
        "bp-vs-enumeration",
        pass,
        format!("{cases} cases, worst marginal error {worst:.2e}, {:.1}s", elapsed.as_secs_f64()),
    );
}

/// Criterion 4: on leaf-removable 4-XORSAT instances the reversed-leaf
/// masked sampler with fixed-point BP is exact: success rate exactly one
/// on 100 instances at n = 24, and chi-square-uniform over the enumerated
/// solution set on 20 instances at n = 12.
#[test]
fn criterion_4_reversed_leaf_exactness() {
    let started = Instant::now();
    let master = 0xACC4u64;

    // part 1: success rate exactly 1.0 on 100 leaf-removable instances
    let mut successes = 0usize;
    let mut found = 0usize;
    let mut attempt = 0u64;
    while found < 100 {
        attempt += 1;
        let mut rng = rng_from(master, &[attempt]);
        let g = gen_random(Kind::Xorsat, 24, 12, 4, &mut rng).unwrap();
        let leaf = leaf_removal(&g);
        if !leaf.success {
            continue;
        }
        found += 1;
        let plan =
            compute_ordering(&g, OrderingStrategy::ReversedLeaf, Some(&leaf), &mut rng)
                .unwrap();
        let mut den = BpDenoiser::new(
            BpDenoiserSpec { rounds: Rounds::FixedPoint, ..Default::default() },
            derive_seed(master, &[attempt]),
        );
        let trace = discrete_sample(&g, &mut den, &plan, &mut rng).unwrap();
        successes += trace.success as usize;
    }

    // part 2: uniformity over the enumerated solution set, 20 instances
    let mut all_uniform = true;
    let mut min_p = 1.0f64;
    let mut found_small = 0usize;
    let mut attempt = 1_000_000u64;
    while found_small < 20 {
        attempt += 1;
        let mut rng = rng_from(master, &[attempt]);
        let g = gen_random(Kind::Xorsat, 12, 6, 4, &mut rng).unwrap();
        let leaf = leaf_removal(&g);
        if !leaf.success {
            continue;
        }
        found_small += 1;
        let solutions = cspd_core::bp::enumerate_solutions(&g).unwrap();
        assert!(!solutions.is_empty(), "leaf-removable implies satisfiable");
        let draws = 50 * solutions.len();
        let mut counts = vec![0u64; solutions.len()];
        for _ in 0..draws {
            let plan =
                compute_ordering(&g, OrderingStrategy::ReversedLeaf, Some(&leaf), &mut rng)
                    .unwrap();
            let mut den = BpDenoiser::new(
                BpDenoiserSpec { rounds: Rounds::FixedPoint, ..Default::default() },
                0,
            );
            let trace = discrete_sample(&g, &mut den, &plan, &mut rng).unwrap();
            assert!(trace.success, "exact sampler must always succeed");
            let idx = solutions
                .iter()
                .position(|s| s.as_slice() == trace.assignment.values())
                .expect("output must be a solution");
            counts[idx] += 1;
        }
        let (_, p) = chisq_uniform_test(&counts);
        min_p = min_p.min(p);
        all_uniform &= p > 0.01;
    }

    let elapsed = started.elapsed();
    let pass = successes == 100 && all_uniform && elapsed.as_secs_f64() < 300.0;
    report(
        4,
        "reversed-leaf-exactness",
        pass,
        format!(
            "success {successes}/100, 20 uniformity tests min p = {min_p:.3}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 5: 4-XORSAT at N = 100 with r = 9 BP denoisers, 500 formulas
/// per density: continuous success dominates discrete at every point, with
/// non-overlapping Wilson intervals at two or more points around the
/// masked/continuous threshold window.
#[test]
fn criterion_5_continuous_beats_discrete() {
    let started = Instant::now();
    let alphas = vec![0.3, 0.4, 0.5, 0.6, 0.7];
    let mut base = ExperimentConfig::new(
        Kind::Xorsat,
        4,
        100,
        alphas.clone(),
        Method::Continuous,
    );
    base.radius = Rounds::Fixed(9);
    base.formulas = 500;
    base.seed = 21;
    base.schedule_l = 500;
    let cont = run_sweep(&base).unwrap();
    let mut disc_cfg = base.clone();
    disc_cfg.method = Method::Discrete;
    let disc = run_sweep(&disc_cfg).unwrap();

    let mut dominated = true;
    let mut separated = 0usize;
    let mut lines = String::new();
    for (c, d) in cont.points.iter().zip(&disc.points) {
        dominated &= c.rate >= d.rate;
        if c.wilson_low > d.wilson_high {
            separated += 1;
        }
        lines.push_str(&format!(
            " a={:.1}: cont {:.3} vs disc {:.3};",
            c.alpha, c.rate, d.rate
        ));
    }
    // low-density anchor: well below the masked threshold the continuous
    // sampler succeeds on at least 80% of formulas
    let anchor = cont.points[1].rate >= 0.8;
    let elapsed = started.elapsed();
    let pass = dominated && separated >= 2 && anchor && elapsed.as_secs_f64() < 1800.0;
    report(
        5,
        "continuous-over-discrete",
        pass,
        format!("{lines} separated at {separated}/5 points, {:.0}s", elapsed.as_secs_f64()),
    );
}

/// Criterion 6: ordering effect on 4-XORSAT at N = 300 with fixed-point
/// BP: reversed-leaf >= 0.8 and random <= 0.2 at alpha = 0.70;
/// reversed-degree strictly between them at alpha = 0.65.
#[test]
fn criterion_6_ordering_effect() {
    let started = Instant::now();
    let run = |ordering: OrderingStrategy, alphas: Vec<f64>| {
        let mut cfg =
            ExperimentConfig::new(Kind::Xorsat, 4, 300, alphas, Method::Discrete);
        cfg.radius = Rounds::FixedPoint;
        cfg.ordering = ordering;
        cfg.formulas = 500;
        cfg.seed = 31;
        run_sweep(&cfg).unwrap()
    };
    let rl = run(OrderingStrategy::ReversedLeaf, vec![0.65, 0.70]);
    let rnd = run(OrderingStrategy::Random, vec![0.65, 0.70]);
    let rd = run(OrderingStrategy::ReversedDegree, vec![0.65]);

    let rl70 = rl.points[1].rate;
    let rnd70 = rnd.points[1].rate;
    let rl65 = rl.points[0].rate;
    let rnd65 = rnd.points[0].rate;
    let rd65 = rd.points[0].rate;
    let elapsed = started.elapsed();
    let pass = rl70 >= 0.8
        && rnd70 <= 0.2
        && rd65 > rnd65
        && rd65 < rl65
        && elapsed.as_secs_f64() < 2700.0;
    report(
        6,
        "ordering-effect",
        pass,
        format!(
            "a=0.70: leaf {rl70:.3} random {rnd70:.3}; a=0.65: leaf {rl65:.3} > degree {rd65:.3} > random {rnd65:.3}, {:.0}s",
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 7: cavity vs zero initialization for the r = 1 discrete BP
/// sampler on 4-SAT at N = 300, alpha in {6, 7}, 500 formulas, one-sided
/// p < 0.05 at both points.
///
/// This criterion does not pass under this implementation: no radius-1
/// denoiser carries usable information in the early steps of a sequential
/// sampler at these densities (both initializations score exactly zero
/// successes out of 500), so no one-sided test can separate them. The
/// cavity machinery itself is exercised and validated in the unit suites;
/// the sampler-level comparison is reported here faithfully.
#[test]
fn criterion_7_cavity_initialization() {
    let started = Instant::now();
    let run = |init: InitName| {
        let mut cfg =
            ExperimentConfig::new(Kind::Sat, 4, 300, vec![6.0, 7.0], Method::Discrete);
        cfg.radius = Rounds::Fixed(1);
        cfg.init = init;
        cfg.formulas = 500;
        cfg.seed = 41;
        run_sweep(&cfg).unwrap()
    };
    let zero = run(InitName::Zero);
    let cavity = run(InitName::Cavity);
    let mut pass = true;
    let mut lines = String::new();
    for (z, c) in zero.points.iter().zip(&cavity.points) {
        let p = one_sided_proportion_test(c.successes, c.trials, z.successes, z.trials);
        pass &= p < 0.05;
        lines.push_str(&format!(
            " a={}: cavity {}/{} vs zero {}/{} (one-sided p = {p:.3});",
            z.alpha, c.successes, c.trials, z.successes, z.trials
        ));
    }
    let elapsed = started.elapsed();
    pass &= elapsed.as_secs_f64() < 2700.0;
    report(7, "cavity-initialization", pass, format!("{lines} {:.0}s", elapsed.as_secs_f64()));
}

/// Criterion 8: uniformity diagnostic on 4-SAT at alpha = 2: the mean of
/// the normalized sample log-probabilities lies within [phi - 0.05, phi],
/// and the spread shrinks when N doubles.
#[test]
fn criterion_8_uniformity() {
    let started = Instant::now();
    let master = 6u64;
    let run_n = |n: usize| -> (f64, f64, usize) {
        let m = (2.0 * n as f64).round() as usize;
        let mut values = Vec::new();
        let mut failures = 0usize;
        for fi in 0..3u64 {
            let mut gen_rng = rng_from(master, &[0x9e, fi]);
            let g = gen_random(Kind::Sat, n, m, 4, &mut gen_rng).unwrap();
            let report = uniformity_test(
                &g,
                |sample_idx| {
                    let mut rng = rng_from(master, &[0x51, fi, sample_idx as u64]);
                    let plan =
                        compute_ordering(&g, OrderingStrategy::Random, None, &mut rng)?;
                    let mut den = BpDenoiser::new(
                        BpDenoiserSpec {
                            rounds: Rounds::Fixed(3),
                            ..Default::default()
                        },
                        derive_seed(master, &[0xde, fi, sample_idx as u64]),
                    );
                    discrete_sample(&g, &mut den, &plan, &mut rng)
                },
                100,
            )
            .unwrap();
            match report {
                Some(r) => {
                    failures += r.n_failures;
                    values.extend(r.values);
                }
                None => failures += 100,
            }
        }
        (cspd_core::stats::mean(&values), pop_std(&values), failures)
    };
    let (mean100, std100, fail100) = run_n(100);
    let (_, std200, _) = run_n(200);
    let reference = phi(4, 2.0);
    let elapsed = started.elapsed();
    let pass = mean100 >= reference - 0.05
        && mean100 <= reference
        && std200 < std100
        && elapsed.as_secs_f64() < 600.0;
    report(
        8,
        "uniformity",
        pass,
        format!(
            "N=100 mean {mean100:.6} in [{:.6}, {:.6}] ({fail100} failures), std {std100:.4} -> {std200:.4} at N=200, {:.0}s",
            reference - 0.05,
            reference,
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 9: sweeps are bit-reproducible: identical config and seed
/// give byte-identical record CSVs for any worker count.
#[test]
fn criterion_9_determinism() {
    let started = Instant::now();
    let make = |workers: usize, method: Method| {
        let mut cfg =
            ExperimentConfig::new(Kind::Xorsat, 3, 30, vec![0.4, 0.7], method);
        cfg.radius = Rounds::FixedPoint;
        cfg.formulas = 25;
        cfg.replicates = 2;
        cfg.seed = 91;
        cfg.workers = workers;
        cfg.schedule_l = 60;
        cfg
    };
    let mut pass = true;
    for method in [Method::Discrete, Method::Continuous] {
        let cfg1 = make(1, method);
        let csv_ref = records_to_csv(&cfg1, &run_sweep(&cfg1).unwrap().records);
        // re-run with the same worker count, then with different ones
        for workers in [1usize, 2, 5, 0] {
            let cfg = make(workers, method);
            let csv = records_to_csv(&cfg, &run_sweep(&cfg).unwrap().records);
            pass &= csv == csv_ref;
        }
    }
    let elapsed = started.elapsed();
    report(
        9,
        "determinism",
        pass,
        format!("byte-identical CSVs across re-runs and worker counts, {:.1}s", elapsed.as_secs_f64()),
    );
}
