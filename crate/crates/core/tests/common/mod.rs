#![allow(dead_code)]

use disparity::regression::{fit_ols, DesignMatrix};
use disparity::synthetic::{generate, CovariateEquation, StructuralParams};
use disparity::{AnalysisSpec, Bindings, Dataset, Estimator, Proposition};

/// Least-squares residual of `v` on an intercept and `others`.
pub fn residualize(v: &[f64], others: &[&[f64]]) -> Vec<f64> {
    let mut x = DesignMatrix::intercept(v.len());
    for (j, o) in others.iter().enumerate() {
        x = x.with_column(format!("v{j}"), o).unwrap();
    }
    let fit = fit_ols(&x, v).unwrap();
    let pred = x.mul_vec(fit.values());
    v.iter().zip(pred).map(|(a, b)| a - b).collect()
}

pub fn continuous(n: usize, seed: u64) -> Dataset {
    let p = StructuralParams {
        group_prevalence: 0.4,
        x_group: -0.6,
        m_group: -0.3,
        m_early: 0.5,
        y_group: -0.2,
        y_early: 0.4,
        y_target: 0.7,
        covariate: Some(CovariateEquation {
            prevalence: 0.5,
            on_early: 0.3,
            on_target: -0.2,
            on_outcome: 0.25,
        }),
        ..Default::default()
    };
    generate(&p, n, seed).unwrap()
}

pub fn spec(d: &Dataset, p: Proposition, e: Estimator) -> AnalysisSpec {
    AnalysisSpec::new(p, e, Bindings::from_roles(d).unwrap())
}

pub fn col(d: &Dataset, name: &str) -> Vec<f64> {
    d.dense(name).unwrap()
}

pub fn replace(d: &Dataset, name: &str, v: &[f64]) -> Dataset {
    d.with_column(name, v.iter().map(|x| Some(*x)).collect()).unwrap()
}
