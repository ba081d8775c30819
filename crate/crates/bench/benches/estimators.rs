use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use disparity::plugin::plugin_mu;
use disparity::regression::{fit_ols, DesignMatrix};
use disparity::synthetic::{generate, CovariateEquation, GeneratorMode, StructuralParams};
use disparity::{bootstrap, decompose, AnalysisSpec, Bindings, BootstrapOptions, Dataset, Estimator, Proposition};

fn continuous(n: usize) -> Dataset {
    let p = StructuralParams {
        x_group: -0.6,
        m_group: -0.3,
        m_early: 0.5,
        y_group: -0.2,
        y_early: 0.4,
        y_target: 0.7,
        covariate: Some(CovariateEquation { prevalence: 0.5, on_early: 0.3, on_target: -0.2, on_outcome: 0.25 }),
        ..Default::default()
    };
    generate(&p, n, 1).unwrap()
}

fn discrete(n: usize) -> Dataset {
    let p = StructuralParams {
        x_intercept: 0.5,
        x_group: -0.2,
        m_intercept: 0.4,
        m_group: -0.2,
        m_early: 0.1,
        y_group: -0.5,
        y_early: 0.4,
        y_target: 0.7,
        mode: GeneratorMode::BinaryXm,
        covariate: Some(CovariateEquation { prevalence: 0.5, on_early: 0.1, on_target: 0.1, on_outcome: 0.3 }),
        ..Default::default()
    };
    generate(&p, n, 2).unwrap()
}

fn spec(d: &Dataset, p: Proposition, e: Estimator) -> AnalysisSpec {
    AnalysisSpec::new(p, e, Bindings::from_roles(d).unwrap())
}

fn ols(c: &mut Criterion) {
    let d = continuous(100_000);
    let y = d.dense("y").unwrap();
    let mut x = DesignMatrix::intercept(d.n_rows());
    for name in ["r", "x", "m", "c"] {
        x = x.with_column(name, &d.dense(name).unwrap()).unwrap();
    }
    c.bench_function("ols_n100k_5cols", |b| b.iter(|| fit_ols(black_box(&x), black_box(&y)).unwrap()));
}

fn estimators(c: &mut Criterion) {
    let d = continuous(100_000);
    let s = spec(&d, Proposition::P4, Estimator::Successive);
    c.bench_function("successive_p4_n100k", |b| b.iter(|| decompose(black_box(&d), &s).unwrap()));

    let d = discrete(100_000);
    let s = spec(&d, Proposition::P4, Estimator::Plugin);
    c.bench_function("plugin_mu_p4_n100k", |b| b.iter(|| plugin_mu(black_box(&d), &s).unwrap()));
}

fn resampling(c: &mut Criterion) {
    let d = continuous(5_000);
    let s = spec(&d, Proposition::P2, Estimator::Successive);
    let opts = BootstrapOptions { replicates: 100, seed: 5, stratify: false };
    let mut g = c.benchmark_group("bootstrap");
    g.sample_size(10);
    g.bench_function("successive_p2_n5k_b100", |b| b.iter(|| bootstrap(black_box(&d), &s, &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, ols, estimators, resampling);
criterion_main!(benches);
