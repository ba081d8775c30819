//! Regression-coefficient estimators of residual disparity and disparity
//! reduction for the P1-P4 interventions.

mod product;
mod saturated;
mod successive;

pub use product::decompose_product_coefficients;
pub use saturated::saturated_standardization;
pub use successive::{decompose_successive_linear, decompose_successive_multix, implied_group_gaps};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{DecompositionEstimate, Scale, Warning};
use crate::regression::{fit_logistic, fit_ols, CoefficientSet, DesignMatrix, Term};
use crate::spec::{AnalysisSpec, Estimator, OutcomeFamily, Proposition};

/// Prevalence above which the log-odds to log-risk approximation is flagged.
pub const RARE_PREVALENCE: f64 = 0.10;

/// Relative threshold for denominators of coefficient ratios.
pub const DENOMINATOR_TOL: f64 = 1e-8;

/// Ratio-scale decomposition for a rare binary outcome, by successive logistic
/// models or by logistic-outcome and linear-mediator products.
pub fn decompose_logistic_rare(d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
    let spec = spec.clone().with_family(OutcomeFamily::RareBinary);
    match spec.estimator {
        Estimator::Successive if spec.bindings.early.len() == 1 => decompose_successive_linear(d, &spec),
        Estimator::Successive => decompose_successive_multix(d, &spec),
        Estimator::Product => decompose_product_coefficients(d, &spec),
        Estimator::Plugin => Err(Error::InvalidSpec(
            "the rare-outcome route is parametric; use SUCCESSIVE or PRODUCT".into(),
        )),
    }
}

/// Rows complete for every bound column, checked to contain both groups.
pub(crate) fn analysis_rows(d: &Dataset, spec: &AnalysisSpec) -> Result<Vec<usize>> {
    let rows = d.complete_rows(&spec.bindings.all_columns())?;
    let (g0, g1) = d.group_rows(&spec.bindings.group, &rows)?;
    if g0.is_empty() {
        return Err(Error::EmptyGroup(0));
    }
    if g1.is_empty() {
        return Err(Error::EmptyGroup(1));
    }
    Ok(rows)
}

pub(crate) fn formula(response: &str, terms: &[Term]) -> String {
    let rhs: Vec<String> = terms.iter().map(Term::label).collect();
    format!("{response} ~ {}", rhs.join(" + "))
}

/// A fitted model together with its formula.
pub(crate) struct Fitted {
    pub formula: String,
    pub coefs: CoefficientSet,
}

pub(crate) fn fit_model(
    d: &Dataset,
    rows: &[usize],
    response: &str,
    terms: &[Term],
    logistic: bool,
) -> Result<Fitted> {
    let x = DesignMatrix::from_dataset(d, rows, terms)?;
    let y = d.values_at(response, rows)?;
    let coefs = if logistic {
        fit_logistic(&x, &y)?
    } else {
        fit_ols(&x, &y)?
    };
    Ok(Fitted {
        formula: formula(response, terms),
        coefs,
    })
}

/// `[group, early..., covariates...]`-style term list.
pub(crate) fn terms(group: &str, middle: &[&str], covariates: &[String]) -> Vec<Term> {
    std::iter::once(group)
        .chain(middle.iter().copied())
        .chain(covariates.iter().map(String::as_str))
        .map(Term::col)
        .collect()
}

pub(crate) fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Disparity terms on the linear-predictor scale.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Parts {
    pub initial: f64,
    pub residual: f64,
    pub reduction: f64,
}

/// Wraps linear-predictor parts into an estimate: as is for a continuous
/// outcome, exponentiated for a rare binary one.
pub(crate) fn finish(
    spec: &AnalysisSpec,
    d: &Dataset,
    rows: &[usize],
    parts: Parts,
    models: &[&Fitted],
) -> Result<DecompositionEstimate> {
    let (scale, p) = match spec.outcome_family {
        OutcomeFamily::Continuous => (Scale::Additive, parts),
        OutcomeFamily::RareBinary => (
            Scale::Ratio,
            Parts {
                initial: parts.initial.exp(),
                residual: parts.residual.exp(),
                reduction: parts.reduction.exp(),
            },
        ),
    };
    let mut est = DecompositionEstimate::new(
        spec.proposition,
        spec.estimator,
        scale,
        p.initial,
        p.residual,
        p.reduction,
    );
    for m in models {
        est = est.with_model(&m.formula, &m.coefs);
    }
    if spec.outcome_family == OutcomeFamily::RareBinary {
        let y = d.values_at(&spec.bindings.outcome, rows)?;
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        if mean > RARE_PREVALENCE {
            est = est.with_warning(Warning::Prevalence { outcome_mean: mean });
        }
    }
    Ok(est)
}

pub(crate) fn require_base(spec: &AnalysisSpec) -> Result<Proposition> {
    if spec.proposition.is_time_dependent() {
        return Err(Error::InvalidSpec(format!(
            "{} is only identified by the plug-in estimator",
            spec.proposition
        )));
    }
    Ok(spec.proposition)
}

/// Fails when `value` is negligible relative to `scale`.
pub(crate) fn check_denominator(value: f64, scale: f64, which: impl FnOnce() -> String) -> Result<()> {
    if !(value.abs() >= DENOMINATOR_TOL * scale) || !value.is_finite() {
        return Err(Error::NearZeroDenominator {
            which: which(),
            value,
        });
    }
    Ok(())
}
