//! Cross-module invariants exercised over realistic trajectories.

use adastep_core::hypergrad::{estimate_hypergrad, HypergradMethod};
use adastep_core::problems::{
    bilevel_quadratic, build_quadratic_pair, linear_hyperrep, logistic_problem,
    parse_sparse_text, BilevelProblem, HyperrepDims, SingleLevelProblem,
};
use adastep_core::step_policies::{
    run_single_level, Decay, EnvelopeSchedule, PolicyKind, PolicyState, SampleMode,
    SingleLevelRng,
};
use adastep_core::{rng, Vector};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

fn random_point(seed: u64, dim: usize) -> Vector {
    let mut r = rng::stream(seed, &[rng::PURPOSE_INIT]);
    Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut r))
}

fn dataset() -> adastep_core::problems::SparseDataset {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/synthetic_sparse.txt");
    parse_sparse_text(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn per_sample_lower_bounds_hold_at_random_probes() {
    // 100 random (sample, point) probes per problem.
    let quad = build_quadratic_pair(11, 3).unwrap();
    let logistic = logistic_problem(dataset());
    let problems: [&dyn SingleLevelProblem; 2] = [&quad, &logistic];
    for p in problems {
        let mut r = rng::stream(500, &[rng::PURPOSE_SAMPLE]);
        for probe in 0..100u64 {
            let i = r.random_range(0..p.n_samples());
            let x = random_point(9000 + probe, p.dim());
            assert!(
                p.sample_value(i, &x) >= p.sample_lower_bound(i) - 1e-12,
                "{}: bound violated at sample {i}",
                p.name()
            );
        }
    }
    // lower-level sample minima really are minima
    let bq = bilevel_quadratic(12, 2, 3, 0.4).unwrap();
    let hr = linear_hyperrep(
        13,
        HyperrepDims {
            features: 4,
            embed: 2,
            targets: 2,
        },
        0.3,
    );
    let bproblems: [&dyn BilevelProblem; 2] = [&bq, &hr];
    for p in bproblems {
        let mut r = rng::stream(501, &[rng::PURPOSE_LOWER]);
        for probe in 0..100u64 {
            let psi = r.random_range(0..p.n_lower_samples());
            let x = random_point(9100 + probe, p.dim_x());
            let y = random_point(9200 + probe, p.dim_y());
            let min = p.lower_sample_min(&x, psi).unwrap();
            assert!(
                p.lower_value(&x, &y, psi) >= min - 1e-10 * (1.0 + min.abs()),
                "{}: sample minimum exceeded",
                p.name()
            );
        }
    }
}

#[test]
fn accepted_line_search_steps_satisfy_the_rule_along_a_trajectory() {
    // Re-implements the sampling loop so the acceptance inequality and the
    // curvature bounds can be asserted on every iteration with full access
    // to the sampled index.
    let problem = build_quadratic_pair(3, 2).unwrap();
    let l_max = problem.smoothness().unwrap();
    let coeff = 0.1;
    let backtrack = 0.5;
    let policy = PolicyState::new(
        PolicyKind::Slsb,
        EnvelopeSchedule::new(10.0, Decay::InvSqrt, 2.0 * (1.0 - coeff) / l_max, coeff).unwrap(),
    )
    .with_backtrack(backtrack)
    .unwrap();
    let mut x = random_point(42, 2);
    let mut r = rng::stream(42, &[rng::PURPOSE_SAMPLE]);
    for k in 0..2000u64 {
        let i = r.random_range(0..2);
        let grad = problem.sample_grad(i, &x);
        let grad_sq = grad.norm_squared();
        if grad_sq == 0.0 {
            continue;
        }
        let f_val = problem.sample_value(i, &x);
        let ls = policy
            .sls_backtrack(k, |g| problem.sample_value(i, &(&x - g * &grad)), f_val, grad_sq)
            .unwrap();
        assert!(!ls.capped, "smooth quadratic should never hit the cap");
        // the acceptance inequality, verbatim
        let accepted = problem.sample_value(i, &(&x - ls.step * &grad));
        assert!(accepted <= f_val - coeff * ls.step * grad_sq);
        // envelope bounds with the backtracking relaxation
        let cap = policy.schedule.cap(k);
        let floor = backtrack * (2.0 * (1.0 - coeff) / l_max).min(cap);
        assert!(ls.step <= cap * (1.0 + 1e-12));
        assert!(ls.step >= floor * (1.0 - 1e-10), "k={k}: {} < {floor}", ls.step);
        x -= ls.step * grad;
    }
}

#[test]
fn same_sample_and_two_sample_land_in_the_same_band() {
    // Final averaged suboptimality of the two sampling modes stays within a
    // factor of three, averaged over five seeds.
    let problem = build_quadratic_pair(8, 2).unwrap();
    let (_, f_star) = problem.optimum().unwrap();
    let iters = 4000;
    let mut totals = [0.0f64; 2];
    for seed in 0..5u64 {
        for (ix, mode) in [SampleMode::SameSample, SampleMode::TwoSample]
            .into_iter()
            .enumerate()
        {
            let mut policy = PolicyState::new(
                PolicyKind::Spsb,
                EnvelopeSchedule::new(5.0, Decay::InvSqrt, 5.0, 1.0).unwrap(),
            )
            .with_sample_mode(mode);
            let mut streams = SingleLevelRng::new(100 + seed);
            let res = run_single_level(
                &problem,
                &mut policy,
                &random_point(seed, 2),
                iters,
                &mut streams,
                None,
            )
            .unwrap();
            totals[ix] += problem.full_value(&res.x_avg) - f_star;
        }
    }
    let ratio = totals[0] / totals[1];
    assert!(
        (1.0 / 3.0..=3.0).contains(&ratio),
        "suboptimality ratio {ratio} outside the band (same {}, two {})",
        totals[0],
        totals[1]
    );
}

#[test]
fn decsps_scaled_monotonicity_along_a_real_run() {
    let problem = logistic_problem(dataset());
    let mut policy = PolicyState::new(
        PolicyKind::DecSps,
        EnvelopeSchedule::new(1000.0, Decay::Constant, 1000.0, 1.0).unwrap(),
    );
    let mut streams = SingleLevelRng::new(17);
    let res = run_single_level(
        &problem,
        &mut policy,
        &Vector::zeros(problem.dim()),
        500,
        &mut streams,
        None,
    )
    .unwrap();
    let mut prev = f64::INFINITY;
    for rec in &res.trace[..500] {
        let ck = ((rec.k + 1) as f64).sqrt();
        let scaled = ck * rec.step_upper;
        assert!(scaled <= prev * (1.0 + 1e-12), "k={}", rec.k);
        prev = scaled;
    }
}

#[test]
fn neumann_variance_stabilizes_over_many_draws() {
    // Empirical variance of the series estimator is finite and stable: the
    // half-sample and full-sample variances agree within a factor of two.
    let problem = bilevel_quadratic(19, 2, 3, 0.3).unwrap();
    let x = random_point(77, 2);
    let y = random_point(78, 3);
    let method = HypergradMethod::Neumann { n: 8 };
    let draws = 10_000;
    let mut r = rng::stream(79, &[rng::PURPOSE_HYPER]);
    let mut samples: Vec<Vector> = Vec::with_capacity(draws);
    for _ in 0..draws {
        let est = estimate_hypergrad(&problem, &x, &y, method, &mut r).unwrap();
        assert!(est.vector.iter().all(|v| v.is_finite()));
        samples.push(est.vector);
    }
    let variance = |chunk: &[Vector]| -> f64 {
        let mut mean = Vector::zeros(2);
        for s in chunk {
            mean += s;
        }
        mean /= chunk.len() as f64;
        chunk.iter().map(|s| (s - &mean).norm_squared()).sum::<f64>() / chunk.len() as f64
    };
    let half = variance(&samples[..draws / 2]);
    let full = variance(&samples);
    assert!(full.is_finite() && full > 0.0);
    let ratio = half / full;
    assert!(
        (0.5..=2.0).contains(&ratio),
        "variance drifting: half {half}, full {full}"
    );
}

#[test]
fn two_sample_bilevel_ratio_uses_independent_draw() {
    // Smoke test: two-sample mode changes the trajectory but stays finite.
    use adastep_core::bilevel::{run_bilevel, BilevelConfig, BilevelMethod, BilevelRng};
    let problem = bilevel_quadratic(20, 2, 2, 0.3).unwrap();
    let upper = EnvelopeSchedule::new(1.0, Decay::InvSqrt, 1e-6, 0.5).unwrap();
    let lower = EnvelopeSchedule::new(0.5, Decay::Inv, 1e-6, 0.5).unwrap();
    let run = |mode: SampleMode| {
        let mut cfg = BilevelConfig::new(BilevelMethod::BiSps, upper.clone(), lower.clone(), 2);
        cfg.sample_mode = mode;
        let mut r = BilevelRng::new(4);
        run_bilevel(&problem, &cfg, &Vector::zeros(2), &Vector::zeros(2), 100, &mut r)
            .unwrap()
            .trace
    };
    let same = run(SampleMode::SameSample);
    let two = run(SampleMode::TwoSample);
    assert_ne!(same, two);
    assert!(same.last().unwrap().loss.is_finite());
    assert!(two.last().unwrap().loss.is_finite());
}
