//! Built-in invariant battery behind the `verify` CLI verb.
//!
//! Each check exercises one contract on small built-in problems and reports
//! pass/fail with a one-line detail. The battery is a fast subset of the
//! full acceptance suite, suitable for a smoke check after installation.

use crate::bilevel::{run_bilevel, AdamState, BilevelConfig, BilevelMethod, BilevelRng};
use crate::harness::config::ExperimentConfig;
use crate::harness::runner;
use crate::hypergrad::{estimate_hypergrad, HypergradMethod};
use crate::problems::{
    bilevel_quadratic, build_quadratic_pair, finite_diff_grad, linear_hyperrep, logistic_problem,
    parse_sparse_text, BilevelProblem, HyperrepDims, SingleLevelProblem,
};
use crate::step_policies::{
    run_single_level, Decay, EnvelopeSchedule, PolicyKind, PolicyState, SingleLevelRng,
};
use crate::{rng, Vector};
use rand_distr::{Distribution, StandardNormal};

pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn report(name: &'static str, outcome: Result<String, String>) -> CheckReport {
    match outcome {
        Ok(detail) => CheckReport {
            name,
            passed: true,
            detail,
        },
        Err(detail) => CheckReport {
            name,
            passed: false,
            detail,
        },
    }
}

fn random_point(seed: u64, dim: usize) -> Vector {
    let mut r = rng::stream(seed, &[rng::PURPOSE_INIT]);
    Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut r))
}

fn check_single_level_gradients() -> Result<String, String> {
    let quad = build_quadratic_pair(1, 3).map_err(|e| e.to_string())?;
    let logistic = logistic_problem(
        parse_sparse_text("1 0:1.5 2:-0.25\n-1 1:1 3:0.75\n1 0:-2 3:1").map_err(|e| e.to_string())?,
    );
    let problems: [&dyn SingleLevelProblem; 2] = [&quad, &logistic];
    let mut worst: f64 = 0.0;
    for p in problems {
        for s in 0..5 {
            let x = random_point(1000 + s, p.dim());
            for i in 0..p.n_samples() {
                let analytic = p.sample_grad(i, &x);
                let numeric = finite_diff_grad(|v| p.sample_value(i, v), &x, 1e-6)
                    .map_err(|e| e.to_string())?;
                let rel = (&analytic - &numeric).norm() / numeric.norm().max(1e-12);
                worst = worst.max(rel);
                if rel > 1e-5 {
                    return Err(format!("{}: sample {i} rel err {rel:.2e}", p.name()));
                }
            }
        }
    }
    Ok(format!("worst rel err {worst:.2e}"))
}

fn check_bilevel_oracles() -> Result<String, String> {
    let bq = bilevel_quadratic(2, 3, 4, 0.2).map_err(|e| e.to_string())?;
    let hr = linear_hyperrep(
        3,
        HyperrepDims {
            features: 4,
            embed: 3,
            targets: 2,
        },
        0.5,
    );
    let problems: [&dyn BilevelProblem; 2] = [&bq, &hr];
    let mut worst: f64 = 0.0;
    for p in problems {
        for s in 0..3 {
            let x = random_point(2000 + s, p.dim_x());
            // reduced gradient vs finite differences
            let analytic = p.hyper_grad(&x).ok_or("missing reduced-gradient oracle")?;
            let numeric = finite_diff_grad(
                |v| p.hyper_objective(v).expect("oracle present"),
                &x,
                1e-6,
            )
            .map_err(|e| e.to_string())?;
            let rel = (&analytic - &numeric).norm() / numeric.norm().max(1e-12);
            worst = worst.max(rel);
            if rel > 1e-5 {
                return Err(format!("{}: reduced gradient rel err {rel:.2e}", p.name()));
            }
            // lower solution stationarity
            let ys = p.y_star(&x).ok_or("missing lower-solution oracle")?;
            let g = p.lower_grad_y_mean(&x, &ys);
            if g.norm() > 1e-8 {
                return Err(format!("{}: ‖∇_y g(x, y*)‖ = {:.2e}", p.name(), g.norm()));
            }
            // symmetry of the Hessian-vector product
            let u = random_point(3000 + s, p.dim_y());
            let v = random_point(4000 + s, p.dim_y());
            let y = random_point(5000 + s, p.dim_y());
            let hu = p.lower_hessian_vec(&x, &y, 0, &u);
            let hv = p.lower_hessian_vec(&x, &y, 0, &v);
            let asym = (u.dot(&hv) - v.dot(&hu)).abs() / u.dot(&hv).abs().max(1.0);
            if asym > 1e-10 {
                return Err(format!("{}: HVP asymmetry {asym:.2e}", p.name()));
            }
        }
    }
    Ok(format!("worst reduced-gradient rel err {worst:.2e}"))
}

fn check_hypergrad_equivalence() -> Result<String, String> {
    let p = bilevel_quadratic(4, 3, 3, 0.0).map_err(|e| e.to_string())?;
    let mut r = rng::stream(4, &[rng::PURPOSE_HYPER]);
    let mut worst: f64 = 0.0;
    for s in 0..10 {
        let x = random_point(6000 + s, 3);
        let y = p.y_star(&x).ok_or("missing oracle")?;
        let est = estimate_hypergrad(
            &p,
            &x,
            &y,
            HypergradMethod::ConjugateGradient {
                tol: 1e-12,
                max_iter: 32,
            },
            &mut r,
        )
        .map_err(|e| e.to_string())?;
        let oracle = p.hyper_grad(&x).unwrap();
        let rel = (&est.vector - &oracle).norm() / oracle.norm().max(1e-12);
        worst = worst.max(rel);
        if rel > 1e-8 {
            return Err(format!("rel err {rel:.2e} at probe {s}"));
        }
    }
    Ok(format!("worst rel err {worst:.2e}"))
}

fn check_envelope_bounds() -> Result<String, String> {
    let p = build_quadratic_pair(5, 2).map_err(|e| e.to_string())?;
    let l_max = p.smoothness().unwrap();
    let coeff = 1.0;
    let schedule = EnvelopeSchedule::new(5.0, Decay::InvSqrt, 1.0 / (2.0 * coeff * l_max), coeff)
        .map_err(|e| e.to_string())?;
    let mut policy = PolicyState::new(PolicyKind::Spsb, schedule.clone());
    let mut streams = SingleLevelRng::new(7);
    let res = run_single_level(&p, &mut policy, &random_point(7000, 2), 300, &mut streams, None)
        .map_err(|e| e.to_string())?;
    for rec in &res.trace[..300] {
        let floor = (1.0 / (2.0 * coeff * l_max)).min(schedule.cap(rec.k));
        let cap = schedule.cap(rec.k);
        if rec.step_upper < floor * (1.0 - 1e-10) || rec.step_upper > cap * (1.0 + 1e-12) {
            return Err(format!(
                "step {} outside [{floor}, {cap}] at k={}",
                rec.step_upper, rec.k
            ));
        }
    }
    Ok("300 iterations inside the envelope".to_string())
}

fn check_armijo_acceptance() -> Result<String, String> {
    let p = bilevel_quadratic(6, 2, 3, 0.05).map_err(|e| e.to_string())?;
    let upper = EnvelopeSchedule::new(5.0, Decay::InvSqrt, 5e-6, 0.5).map_err(|e| e.to_string())?;
    let lower = EnvelopeSchedule::new(1.0, Decay::Constant, 1e-6, 0.5).map_err(|e| e.to_string())?;
    for method in [BilevelMethod::BiSlsSgd, BilevelMethod::BiSlsAdam] {
        let cfg = BilevelConfig::new(method, upper.clone(), lower.clone(), 3);
        let mut r = BilevelRng::new(11);
        let res = run_bilevel(&p, &cfg, &Vector::zeros(2), &Vector::zeros(3), 50, &mut r)
            .map_err(|e| e.to_string())?;
        for w in &res.witnesses {
            if !w.capped && !w.holds() {
                return Err(format!("{method:?}: accepted step violates the rule at k={}", w.k));
            }
        }
    }
    Ok("accepted steps satisfy the sufficient-decrease rule".to_string())
}

fn check_adam_algebra() -> Result<String, String> {
    let mut st = AdamState::new(2);
    let h = Vector::from_vec(vec![0.3, -2.0]);
    st.update(&h);
    let g1 = st.second_moment();
    for i in 0..2 {
        let rel = (g1[i] - h[i] * h[i]).abs() / (h[i] * h[i]);
        if rel > 1e-15 {
            return Err(format!("first-step second moment off by {rel:.2e}"));
        }
    }
    for _ in 0..100 {
        st.update(&h);
        let g = st.second_moment();
        for i in 0..2 {
            let rel = (g[i] - h[i] * h[i]).abs() / (h[i] * h[i]);
            if rel > 1e-15 {
                return Err(format!("corrected moment drifted by {rel:.2e}"));
            }
        }
    }
    Ok("bias-corrected accumulator is exact for constant input".to_string())
}

fn check_determinism() -> Result<String, String> {
    let cfg = ExperimentConfig::from_text(
        "problem.kind = quadratic_pair\nproblem.seed = 9\noptimizer.kind = slsb\n\
         optimizer.gamma_b0 = 10\nrun.iters = 60\nrun.repeats = 2\n",
    )
    .map_err(|e| e.to_string())?;
    let dir = std::env::temp_dir().join(format!("adastep-verify-{}", std::process::id()));
    let run = |sub: &str| -> Result<Vec<Vec<u8>>, String> {
        let out = runner::run_experiment_in(&cfg, &dir.join(sub)).map_err(|e| e.to_string())?;
        out.trace_paths
            .iter()
            .map(|p| std::fs::read(p).map_err(|e| e.to_string()))
            .collect()
    };
    let result = (|| {
        let a = run("a")?;
        let b = run("b")?;
        if a != b {
            return Err("trace bytes differ between identical runs".to_string());
        }
        Ok("byte-identical traces".to_string())
    })();
    let _ = std::fs::remove_dir_all(&dir);
    result
}

/// Run the whole battery.
pub fn run_all() -> Vec<CheckReport> {
    vec![
        report("gradients_match_finite_differences", check_single_level_gradients()),
        report("bilevel_oracles_consistent", check_bilevel_oracles()),
        report("hypergradient_matches_reduced_gradient", check_hypergrad_equivalence()),
        report("envelope_bounds_hold", check_envelope_bounds()),
        report("armijo_acceptance_contract", check_armijo_acceptance()),
        report("adam_bias_correction_exact", check_adam_algebra()),
        report("runs_are_deterministic", check_determinism()),
    ]
}
