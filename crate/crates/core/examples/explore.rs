//! Scratch exploration for acceptance-criterion configs (not shipped).

use adastep_core::bilevel::{run_bilevel, BilevelConfig, BilevelMethod, BilevelRng, ResetOption};
use adastep_core::problems::{
    bilevel_quadratic, logistic_problem, parse_sparse_text, BilevelProblem, SingleLevelProblem,
};
use adastep_core::step_policies::{
    run_single_level, Decay, EnvelopeSchedule, PolicyKind, PolicyState, SingleLevelRng,
};
use adastep_core::{rng, Vector};
use rand_distr::{Distribution, StandardNormal};

fn random_point(seed: u64, dim: usize) -> Vector {
    let mut r = rng::stream(seed, &[rng::PURPOSE_INIT]);
    Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut r))
}

fn dataset() -> adastep_core::problems::SparseDataset {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/synthetic_sparse.txt");
    parse_sparse_text(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn single_policy(kind: PolicyKind, cap0: f64, decay: Decay, coeff: f64, floor: f64) -> PolicyState {
    PolicyState::new(kind, EnvelopeSchedule::new(cap0, decay, floor, coeff).unwrap())
}

fn explore_fig3() {
    println!("=== criterion 4: logistic qualitative ===");
    let problem = logistic_problem(dataset());
    let l_max = problem.smoothness().unwrap();
    println!("L_max = {l_max}");
    let iters = 4000u64;
    for seed in 0..5u64 {
        let x0 = Vector::zeros(problem.dim());
        let run = |mut pol: PolicyState, seed: u64| {
            let mut streams = SingleLevelRng::new(seed);
            run_single_level(&problem, &mut pol, &x0, iters, &mut streams, None).unwrap()
        };
        let spsb = run(
            single_policy(PolicyKind::Spsb, 1000.0, Decay::InvSqrt, 1.0, 1.0 / (2.0 * l_max)),
            seed,
        );
        let slsb = run(
            single_policy(PolicyKind::Slsb, 1000.0, Decay::InvSqrt, 0.1, 1.8 / l_max),
            seed,
        );
        let decsps = run(
            single_policy(PolicyKind::DecSps, 1000.0, Decay::Constant, 1.0, 1000.0),
            seed,
        );
        println!(
            "seed {seed}: final spsb {:.4e} slsb {:.4e} decsps {:.4e}",
            spsb.trace.last().unwrap().loss,
            slsb.trace.last().unwrap().loss,
            decsps.trace.last().unwrap().loss,
        );
    }
}

fn bilevel_cfg(
    method: BilevelMethod,
    alpha_b0: f64,
    p: f64,
    reset: ResetOption,
) -> BilevelConfig {
    let upper = EnvelopeSchedule::new(alpha_b0, Decay::InvSqrt, 1e-6 * alpha_b0, p).unwrap();
    let lower = EnvelopeSchedule::new(1.0, Decay::Constant, 1e-9, p).unwrap();
    let mut cfg = BilevelConfig::new(method, upper, lower, 3);
    cfg.sufficient_decrease = p;
    cfg.reset = reset;
    cfg
}

fn explore_c7(noise: f64, init_scale: f64) {
    println!("=== criterion 7: contract + caps (noise {noise}, init x{init_scale}) ===");
    let problem = bilevel_quadratic(100, 3, 3, noise).unwrap();
    for method in [BilevelMethod::BiSlsSgd, BilevelMethod::BiSlsAdam] {
        for seed in 0..5u64 {
            let x0 = init_scale * random_point(700 + seed, 3);
            let y0 = init_scale * random_point(800 + seed, 3);
            let cfg = bilevel_cfg(method, 100.0, 0.01, ResetOption::GrowPrevious { eta: 2.0 });
            let mut r = BilevelRng::new(seed);
            let res = run_bilevel(&problem, &cfg, &x0, &y0, 500, &mut r).unwrap();
            let caps = res
                .trace
                .iter()
                .filter(|t| t.flags & adastep_core::harness::trace::flags::BACKTRACK_CAP != 0)
                .count();
            let viol = res.witnesses.iter().filter(|w| !w.capped && !w.holds()).count();
            println!(
                "  {method:?} seed {seed}: F0 {:.3e} -> final {:.6e}, caps {caps} ({:.2}%), viol {viol}",
                res.trace[0].loss,
                res.trace.last().unwrap().loss,
                100.0 * caps as f64 / 500.0
            );
        }
    }
}

fn explore_c8(noise: f64, init_scale: f64) {
    println!("=== criterion 8: reset ordering (noise {noise}, init x{init_scale}) ===");
    let problem = bilevel_quadratic(100, 3, 3, noise).unwrap();
    for seed in 0..5u64 {
        let x0 = init_scale * random_point(700 + seed, 3);
        let y0 = init_scale * random_point(800 + seed, 3);
        let mut rows = Vec::new();
        for (name, reset) in [
            ("opt1", ResetOption::FromInitial),
            ("opt2", ResetOption::FromPrevious),
            ("opt3", ResetOption::GrowPrevious { eta: 2.0 }),
        ] {
            let cfg = bilevel_cfg(BilevelMethod::BiSlsSgd, 100.0, 0.01, reset);
            let mut r = BilevelRng::new(seed);
            let res = run_bilevel(&problem, &cfg, &x0, &y0, 500, &mut r).unwrap();
            let evals: u64 = res.trace.iter().map(|t| t.evals_upper).sum();
            let caps = res
                .trace
                .iter()
                .filter(|t| t.flags & adastep_core::harness::trace::flags::BACKTRACK_CAP != 0)
                .count();
            rows.push((name, evals, res.trace.last().unwrap().loss, caps));
        }
        let ord = rows[1].1 <= rows[2].1 && rows[2].1 <= rows[0].1;
        let band = (rows[2].2 - rows[0].2).abs() <= 0.1 * rows[0].2.abs();
        println!(
            "  seed {seed}: opt1 ({}, {:.4e}, caps {}) opt2 ({}, {:.4e}, caps {}) opt3 ({}, {:.4e}, caps {}) | order {} band {}",
            rows[0].1, rows[0].2, rows[0].3, rows[1].1, rows[1].2, rows[1].3, rows[2].1, rows[2].2, rows[2].3, ord, band
        );
    }
}

fn explore_c10(noise: f64) {
    println!("=== criterion 10: robustness ordering (noise {noise}) ===");
    let problem = bilevel_quadratic(100, 3, 3, noise).unwrap();
    for seed in 0..5u64 {
        let x0 = random_point(700 + seed, 3);
        let y0 = random_point(800 + seed, 3);
        let mut ratios = Vec::new();
        for method in [BilevelMethod::BiSps, BilevelMethod::DecayingSgd] {
            let mut finals = Vec::new();
            for alpha in [0.1, 1.0, 10.0, 100.0] {
                let upper = EnvelopeSchedule::new(alpha, Decay::InvSqrt, 1e-6 * alpha, 0.5).unwrap();
                let lower = EnvelopeSchedule::new(0.5, Decay::Inv, 1e-9, 0.5).unwrap();
                let mut cfg = BilevelConfig::new(method, upper, lower, 3);
                cfg.lower_policy = adastep_core::bilevel::LowerPolicy::Sps;
                let mut r = BilevelRng::new(seed);
                let res = run_bilevel(&problem, &cfg, &x0, &y0, 1000, &mut r).unwrap();
                finals.push(res.trace.last().unwrap().loss);
            }
            let max = finals.iter().cloned().fold(f64::MIN, f64::max);
            let min = finals.iter().cloned().fold(f64::MAX, f64::min);
            ratios.push(max / min);
        }
        println!(
            "  seed {seed}: bisps ratio {:.3e} vs sgd ratio {:.3e} -> {}",
            ratios[0],
            ratios[1],
            ratios[0] < ratios[1]
        );
    }
}

fn main() {
    explore_fig3();
    explore_c7(0.1, 30.0);
    explore_c8(0.1, 1.0);
    explore_c8(0.05, 1.0);
    explore_c10(0.1);
}
