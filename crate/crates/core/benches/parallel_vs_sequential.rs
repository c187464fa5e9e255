use std::hint::black_box;

use compwb_core::experiments::negative_chain;
use compwb_core::functions::{seminorm_p_lambda, ModelFunction};
use compwb_core::par;
use compwb_core::weights::{ConjugateEvaluator, WeightFunction};
use compwb_core::Grid;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, bool); 2] = [("parallel", false), ("sequential", true)];

fn seminorm(c: &mut Criterion) {
    let conj = ConjugateEvaluator::auto(WeightFunction::gevrey(2.0).into_arc());
    let grid = Grid::sym(8.0, 1.0 / 32.0);
    let mut group = c.benchmark_group("seminorm_p_lambda");
    group.sample_size(10);
    for (name, seq) in MODES {
        group.bench_function(BenchmarkId::new(name, "gaussian_J24"), |b| {
            par::set_sequential(seq);
            b.iter(|| {
                seminorm_p_lambda(
                    &ModelFunction::Gaussian,
                    2.0,
                    &conj,
                    black_box(&grid),
                    24,
                    24,
                )
                .unwrap()
            })
        });
    }
    par::set_sequential(false);
    group.finish();
}

fn chain(c: &mut Criterion) {
    let mut group = c.benchmark_group("negative_chain");
    group.sample_size(10);
    for (name, seq) in MODES {
        group.bench_function(BenchmarkId::new(name, "d2_k1_j2000"), |b| {
            par::set_sequential(seq);
            b.iter(|| negative_chain(2.0, 1.0, 3.5, black_box(2000), 1e300).unwrap())
        });
    }
    par::set_sequential(false);
    group.finish();
}

criterion_group!(benches, seminorm, chain);
criterion_main!(benches);
