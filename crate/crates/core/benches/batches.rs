//! Sequential against rayon execution on the two largest randomized batches.
//! Build with `--no-default-features` to see the sequential fallback alone.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use iwasawa_core::parallel::Execution;
use iwasawa_core::verify::{lemma_suite, yprime_formula};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn fitt_yprime(c: &mut Criterion) {
    let mut g = c.benchmark_group("fitt-yprime");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| yprime_formula(1, 20, exec).unwrap())
        });
    }
    g.finish();
}

fn lemmas(c: &mut Criterion) {
    let mut g = c.benchmark_group("lemma-suite");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| lemma_suite(1, 50, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, fitt_yprime, lemmas);
criterion_main!(benches);
