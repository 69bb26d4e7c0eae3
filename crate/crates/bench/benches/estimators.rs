//! Hot-path benchmarks: likelihood evaluation, link construction, the IRLS
//! solver, one LAHEML sweep, and the AUC statistic.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mestbench_bench::logit_dataset;
use mestbench_core::baselines::{fit_mle_logistic, IrlsSettings};
use mestbench_core::metrics::auc;
use mestbench_core::model::{link_state, RescaleRule, UnifiedParams};
use mestbench_core::proposed::{fit_laheml, unified_loglik, LahemlSettings, MethodKind};
use ndarray::arr1;

fn bench_unified_loglik(c: &mut Criterion) {
    let mut group = c.benchmark_group("unified_loglik");
    for n in [100usize, 1000] {
        let sim = logit_dataset(n, 7);
        let rescale = RescaleRule::for_dataset(&sim.dataset);
        let params = UnifiedParams::new(arr1(&[0.2, 0.8, -0.6]), 0.7, 1.4).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| unified_loglik(black_box(&sim.dataset), &params, &rescale, 0.0).unwrap())
        });
    }
    group.finish();
}

fn bench_link_state(c: &mut Criterion) {
    let sim = logit_dataset(1000, 9);
    let rescale = RescaleRule::for_dataset(&sim.dataset);
    let beta = arr1(&[0.2, 0.8, -0.6]);
    c.bench_function("link_state_n1000", |b| {
        b.iter(|| link_state(black_box(&sim.dataset.design), &beta.view(), 0.7, 1.4, &rescale))
    });
}

fn bench_irls(c: &mut Criterion) {
    let mut group = c.benchmark_group("irls_mle");
    group.sample_size(30);
    for n in [100usize, 1000] {
        let sim = logit_dataset(n, 11);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| fit_mle_logistic(black_box(&sim.dataset), &IrlsSettings::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_laheml(c: &mut Criterion) {
    let sim = logit_dataset(200, 13);
    let settings = LahemlSettings { iterations: 200, burn_in: 100, ..LahemlSettings::with_seed(1) };
    let mut group = c.benchmark_group("laheml_200it_n200");
    group.sample_size(10);
    group.bench_function("unified", |b| {
        b.iter(|| fit_laheml(black_box(&sim.dataset), MethodKind::Unified, &settings).unwrap())
    });
    group.finish();
}

fn bench_auc(c: &mut Criterion) {
    let sim = logit_dataset(2000, 17);
    let fit = fit_mle_logistic(&sim.dataset, &IrlsSettings::default()).unwrap();
    let y = sim.dataset.y.clone();
    c.bench_function("auc_n2000", |b| {
        b.iter(|| auc(black_box(y.view()), black_box(fit.probs_train.view())).unwrap())
    });
}

criterion_group!(
    benches,
    bench_unified_loglik,
    bench_link_state,
    bench_irls,
    bench_laheml,
    bench_auc
);
criterion_main!(benches);
