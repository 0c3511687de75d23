use adastep_bench::bilevel_fixture;
use adastep_core::hypergrad::{estimate_hypergrad, HypergradMethod};
use adastep_core::problems::BilevelProblem;
use adastep_core::{rng, Vector};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_estimators(c: &mut Criterion) {
    let problem = bilevel_fixture();
    let x = Vector::from_element(problem.dim_x(), 0.3);
    let y = problem.y_star(&x).unwrap();
    let mut group = c.benchmark_group("hypergrad");
    for (name, method) in [
        (
            "cg",
            HypergradMethod::ConjugateGradient {
                tol: 1e-10,
                max_iter: problem.dim_y(),
            },
        ),
        ("neumann_10", HypergradMethod::Neumann { n: 10 }),
        ("identity", HypergradMethod::Identity),
    ] {
        group.bench_function(name, |b| {
            let mut r = rng::stream(1, &[rng::PURPOSE_HYPER]);
            b.iter(|| {
                black_box(estimate_hypergrad(&problem, &x, &y, method, &mut r).unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_estimators);
criterion_main!(benches);
