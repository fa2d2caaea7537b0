use std::hint::black_box;

use ccbo::config::Execution;
use ccbo::consensus::compute_consensus;
use ccbo::dynamics::semi_implicit_step;
use ccbo::ensemble::init_ensemble;
use ccbo::problems::{experiment, NamedExperiment};
use ccbo::rng::RngStream;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn setup(name: &str, n_particles: usize, execution: Execution) -> NamedExperiment {
    let mut e = experiment(name).unwrap();
    e.config.n_particles = n_particles;
    e.config.execution = execution;
    e.config.trace_stride = 0;
    e
}

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("semi_implicit_step");
    for (name, n) in [("ackley-d20-case3", 100), ("thomson-k8", 50), ("thomson-k56", 200)] {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let e = setup(name, n, exec);
            let rng = RngStream::new(1);
            let ens = init_ensemble(&e.config, e.problem.dim, &rng).unwrap();
            let cp = compute_consensus(&ens, |v| e.problem.eval(v), e.config.alpha).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), format!("{name}/N{n}")), &(), |b, _| {
                b.iter(|| semi_implicit_step(black_box(&ens), &cp, &e.problem.constraints, &e.config, &rng).unwrap())
            });
        }
    }
    group.finish();
}

fn full_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("full_run");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let e = setup("quadratic-ellipse", 50, exec);
        group.bench_function(BenchmarkId::new(format!("{exec:?}"), "quadratic-ellipse"), |b| {
            b.iter(|| e.run(black_box(3)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, step, full_run);
criterion_main!(benches);
