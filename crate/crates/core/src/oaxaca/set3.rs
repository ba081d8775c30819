use super::{check_ob_spec, p2_anchor};
use crate::data::Dataset;
use crate::error::Result;
use crate::estimate::{DecompositionEstimate, Scale};
use crate::parametric::{analysis_rows, fit_model, Fitted};
use crate::regression::Term;
use crate::spec::{AnalysisSpec, Proposition};

/// Pooled model `response ~ r + vars + c + r:vars + r:c`.
fn interacted(
    d: &Dataset,
    rows: &[usize],
    response: &str,
    group: &str,
    vars: &[&str],
    covariates: &[String],
) -> Result<Fitted> {
    let mut terms = vec![Term::col(group)];
    terms.extend(vars.iter().map(|v| Term::col(v)));
    terms.extend(covariates.iter().map(|c| Term::col(c)));
    terms.extend(vars.iter().map(|v| Term::product(group, v)));
    terms.extend(covariates.iter().map(|c| Term::product(group, c)));
    fit_model(d, rows, response, &terms, false)
}

/// Prediction of an interacted model at group `r`, given values for its
/// main-effect variables (in `vars` then covariate order).
fn predict_at(model: &Fitted, group: &str, names: &[&str], values: &[f64], r: f64) -> Result<f64> {
    let c = &model.coefs;
    let mut out = c.intercept() + c.coef(group)? * r;
    for (name, v) in names.iter().zip(values) {
        out += c.coef(name)? * v;
        out += c.coef(&format!("{group}:{name}"))? * r * v;
    }
    Ok(out)
}

/// P1-P4 from a pooled outcome model with group interactions on every
/// regressor, read off its coefficients directly.
///
/// Group-specific means of the early variable and target at the covariate
/// profile come from pooled, fully interacted models for those variables, so
/// every quantity is a linear function of pooled coefficients. The covariate
/// profile is the group-0 mean, as in [`proposition_via_oaxaca`](super::proposition_via_oaxaca).
pub fn interaction_model_formulas(d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
    let x = check_ob_spec(spec)?;
    let b = &spec.bindings;
    let (r, m) = (b.group.as_str(), b.target.as_str());
    let rows = analysis_rows(d, spec)?;
    let (g0, _) = d.group_rows(r, &rows)?;
    let profile: Vec<f64> = b
        .covariates
        .iter()
        .map(|c| {
            let v = d.values_at(c, &g0)?;
            Ok(v.iter().sum::<f64>() / v.len() as f64)
        })
        .collect::<Result<_>>()?;
    let cov: Vec<&str> = b.covariates.iter().map(String::as_str).collect();
    fn with<'a>(head: &[&'a str], cov: &[&'a str]) -> Vec<&'a str> {
        [head, cov].concat()
    }
    let vals = |head: &[f64]| -> Vec<f64> { [head, profile.as_slice()].concat() };
    let gamma = |model: &Fitted, name: &str| model.coefs.coef(name);
    let inter = |model: &Fitted, name: &str| model.coefs.coef(&format!("{r}:{name}"));
    // sum over covariates of (r:c coefficient) * profile value
    let cov_gap = |model: &Fitted| -> Result<f64> {
        let mut s = 0.0;
        for (c, v) in cov.iter().zip(&profile) {
            s += inter(model, c)? * v;
        }
        Ok(s)
    };

    let x_model = interacted(d, &rows, x, r, &[], &b.covariates)?;
    let x0 = predict_at(&x_model, r, &with(&[], &cov), &vals(&[]), 0.0)?;
    let x1 = predict_at(&x_model, r, &with(&[], &cov), &vals(&[]), 1.0)?;

    let (residual, reduction) = match spec.proposition {
        Proposition::P1 => {
            let y = interacted(d, &rows, &b.outcome, r, &[x], &b.covariates)?;
            let residual = gamma(&y, r)? + inter(&y, x)? * x0 + cov_gap(&y)?;
            let reduction = (gamma(&y, x)? + inter(&y, x)?) * (x1 - x0);
            (residual, reduction)
        }
        Proposition::P2 => {
            let at = p2_anchor(d, spec, &rows)?;
            let y = interacted(d, &rows, &b.outcome, r, &[x, m], &b.covariates)?;
            let m_model = interacted(d, &rows, m, r, &[x], &b.covariates)?;
            let m0 = predict_at(&m_model, r, &with(&[x], &cov), &vals(&[at]), 0.0)?;
            let m1 = predict_at(&m_model, r, &with(&[x], &cov), &vals(&[at]), 1.0)?;
            let residual = gamma(&y, r)? + inter(&y, x)? * at + inter(&y, m)? * m0 + cov_gap(&y)?;
            let reduction = (gamma(&y, m)? + inter(&y, m)?) * (m1 - m0);
            (residual, reduction)
        }
        _ => {
            let y = interacted(d, &rows, &b.outcome, r, &[x, m], &b.covariates)?;
            let m_model = interacted(d, &rows, m, r, &[], &b.covariates)?;
            let m0 = predict_at(&m_model, r, &with(&[], &cov), &vals(&[]), 0.0)?;
            let m1 = predict_at(&m_model, r, &with(&[], &cov), &vals(&[]), 1.0)?;
            let slope_x1 = gamma(&y, x)? + inter(&y, x)?;
            let slope_m1 = gamma(&y, m)? + inter(&y, m)?;
            if spec.proposition == Proposition::P3 {
                let residual = gamma(&y, r)? + inter(&y, x)? * x0 + inter(&y, m)? * m0 + cov_gap(&y)?;
                (residual, slope_x1 * (x1 - x0) + slope_m1 * (m1 - m0))
            } else {
                let residual = gamma(&y, r)?
                    + gamma(&y, x)? * (x1 - x0)
                    + inter(&y, x)? * x1
                    + inter(&y, m)? * m0
                    + cov_gap(&y)?;
                (residual, slope_m1 * (m1 - m0))
            }
        }
    };
    Ok(DecompositionEstimate::new(
        spec.proposition,
        spec.estimator,
        Scale::Additive,
        residual + reduction,
        residual,
        reduction,
    ))
}
