use super::{analysis_rows, finish, fit_model, require_base, terms, Parts};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::DecompositionEstimate;
use crate::spec::{AnalysisSpec, OutcomeFamily, Proposition};

/// Outcome model `y ~ r + x + m + c` combined with linear models for the
/// target (`m ~ r + x + c`) and the early variable (`x ~ r + c`).
///
/// For a rare binary outcome only the outcome model is logistic.
pub fn decompose_product_coefficients(d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
    let prop = require_base(spec)?;
    let b = &spec.bindings;
    let [x] = b.early.as_slice() else {
        return Err(Error::InvalidSpec(
            "PRODUCT requires exactly one early column and one target column".into(),
        ));
    };
    let m = b.target.as_str();
    let rows = analysis_rows(d, spec)?;
    let logistic = spec.outcome_family == OutcomeFamily::RareBinary;
    let outcome = fit_model(d, &rows, &b.outcome, &terms(&b.group, &[x, m], &b.covariates), logistic)?;
    let target = fit_model(d, &rows, m, &terms(&b.group, &[x], &b.covariates), false)?;
    let early = fit_model(d, &rows, x, &terms(&b.group, &[], &b.covariates), false)?;

    let y_r = outcome.coefs.coef(&b.group)?;
    let y_x = outcome.coefs.coef(x)?;
    let y_m = outcome.coefs.coef(m)?;
    let m_r = target.coefs.coef(&b.group)?;
    let m_x = target.coefs.coef(x)?;
    let x_r = early.coefs.coef(&b.group)?;

    // direct, through M only, through X only, through X then M
    let direct = y_r;
    let via_m = m_r * y_m;
    let via_x = x_r * y_x;
    let via_xm = x_r * m_x * y_m;

    let (residual, reduction) = match prop {
        Proposition::P1 => (direct + via_m, via_x + via_xm),
        Proposition::P2 => (direct, via_m),
        Proposition::P3 => (direct, via_x + via_m + via_xm),
        _ => (direct + via_x, via_m + via_xm),
    };
    let parts = Parts {
        initial: residual + reduction,
        residual,
        reduction,
    };
    finish(spec, d, &rows, parts, &[&outcome, &target, &early])
}
