use super::{
    analysis_rows, check_denominator, finish, fit_model, require_base, sample_sd, terms, Fitted, Parts,
};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::DecompositionEstimate;
use crate::spec::{AnalysisSpec, OutcomeFamily, Proposition};

fn coefficient_scale(spec: &AnalysisSpec, d: &Dataset, rows: &[usize], x: &str) -> Result<f64> {
    let sx = sample_sd(&d.values_at(x, rows)?);
    let sy = match spec.outcome_family {
        OutcomeFamily::Continuous => sample_sd(&d.values_at(&spec.bindings.outcome, rows)?),
        OutcomeFamily::RareBinary => 1.0,
    };
    Ok(sy / sx)
}

/// Nested outcome models `y ~ r + c`, `y ~ r + x + c`, `y ~ r + x + m + c`,
/// differenced on the group coefficient.
pub fn decompose_successive_linear(d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
    let prop = require_base(spec)?;
    let b = &spec.bindings;
    let [x] = b.early.as_slice() else {
        return Err(Error::InvalidSpec(
            "the single-measure successive estimator needs exactly one early column".into(),
        ));
    };
    let logistic = spec.outcome_family == OutcomeFamily::RareBinary;
    let rows = analysis_rows(d, spec)?;
    let total = fit_model(d, &rows, &b.outcome, &terms(&b.group, &[], &b.covariates), logistic)?;
    let early = fit_model(d, &rows, &b.outcome, &terms(&b.group, &[x], &b.covariates), logistic)?;
    let full = fit_model(
        d,
        &rows,
        &b.outcome,
        &terms(&b.group, &[x, &b.target], &b.covariates),
        logistic,
    )?;
    let total_r = total.coefs.coef(&b.group)?;
    let early_r = early.coefs.coef(&b.group)?;
    let early_x = early.coefs.coef(x)?;
    let full_r = full.coefs.coef(&b.group)?;
    let full_x = full.coefs.coef(x)?;

    let parts = match prop {
        Proposition::P1 => Parts {
            initial: total_r,
            residual: early_r,
            reduction: total_r - early_r,
        },
        Proposition::P2 => Parts {
            initial: early_r,
            residual: full_r,
            reduction: early_r - full_r,
        },
        Proposition::P3 => Parts {
            initial: total_r,
            residual: full_r,
            reduction: total_r - full_r,
        },
        _ => {
            let scale = coefficient_scale(spec, d, &rows, x)?;
            check_denominator(early_x, scale, || {
                format!("coefficient of `{x}` in `{}`", early.formula)
            })?;
            let ratio = full_x / early_x;
            Parts {
                initial: total_r,
                residual: full_r + ratio * (total_r - early_r),
                reduction: (early_r - full_r) + (1.0 - ratio) * (total_r - early_r),
            }
        }
    };
    finish(spec, d, &rows, parts, &[&total, &early, &full])
}

/// Group gaps in each early variable implied by a chain of nested outcome
/// models.
///
/// `chain[0]` is the group coefficient of the model without early variables;
/// `chain[j]` for `j >= 1` is the model adding the first `j` early variables,
/// given as `(group coefficient, [coefficients of early 1..=j])`. The gaps
/// solve the omitted-variable identities
/// `chain[0] = group_j + sum_{i<=j} coef_{j,i} * gap_i` one variable at a time.
pub fn implied_group_gaps(total_r: f64, chain: &[(f64, Vec<f64>)]) -> Vec<f64> {
    let mut gaps: Vec<f64> = Vec::with_capacity(chain.len());
    for (j, (group_r, coefs)) in chain.iter().enumerate() {
        let known: f64 = coefs[..j].iter().zip(&gaps).map(|(c, g)| c * g).sum();
        gaps.push((total_r - group_r - known) / coefs[j]);
    }
    gaps
}

/// Nested models adding early variables one at a time, then the target.
pub fn decompose_successive_multix(d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
    let prop = require_base(spec)?;
    let b = &spec.bindings;
    if b.early.is_empty() {
        return Err(Error::InvalidSpec("at least one early column is required".into()));
    }
    let logistic = spec.outcome_family == OutcomeFamily::RareBinary;
    let rows = analysis_rows(d, spec)?;
    let early: Vec<&str> = b.early.iter().map(String::as_str).collect();
    let k = early.len();

    let mut models: Vec<Fitted> = Vec::with_capacity(k + 2);
    for j in 0..=k {
        models.push(fit_model(
            d,
            &rows,
            &b.outcome,
            &terms(&b.group, &early[..j], &b.covariates),
            logistic,
        )?);
    }
    let mut with_target = early.clone();
    with_target.push(&b.target);
    let full = fit_model(d, &rows, &b.outcome, &terms(&b.group, &with_target, &b.covariates), logistic)?;

    let total_r = models[0].coefs.coef(&b.group)?;
    let last_r = models[k].coefs.coef(&b.group)?;
    let full_r = full.coefs.coef(&b.group)?;

    let parts = match prop {
        Proposition::P1 => Parts {
            initial: total_r,
            residual: last_r,
            reduction: total_r - last_r,
        },
        Proposition::P2 => Parts {
            initial: last_r,
            residual: full_r,
            reduction: last_r - full_r,
        },
        Proposition::P3 => Parts {
            initial: total_r,
            residual: full_r,
            reduction: total_r - full_r,
        },
        _ => {
            let mut chain = Vec::with_capacity(k);
            for j in 1..=k {
                let m = &models[j];
                let coefs = early[..j]
                    .iter()
                    .map(|x| m.coefs.coef(x))
                    .collect::<Result<Vec<_>>>()?;
                let scale = coefficient_scale(spec, d, &rows, early[j - 1])?;
                check_denominator(coefs[j - 1], scale, || {
                    format!("coefficient of `{}` in `{}`", early[j - 1], m.formula)
                })?;
                chain.push((m.coefs.coef(&b.group)?, coefs));
            }
            let gaps = implied_group_gaps(total_r, &chain);
            let last = &chain[k - 1].1;
            let mut shift_full = 0.0;
            let mut shift_last = 0.0;
            for (i, x) in early.iter().enumerate() {
                shift_full += full.coefs.coef(x)? * gaps[i];
                shift_last += (last[i] - full.coefs.coef(x)?) * gaps[i];
            }
            Parts {
                initial: total_r,
                residual: full_r + shift_full,
                reduction: (last_r - full_r) + shift_last,
            }
        }
    };
    let mut refs: Vec<&Fitted> = models.iter().collect();
    refs.push(&full);
    finish(spec, d, &rows, parts, &refs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_gap_is_coefficient_drop_over_slope() {
        let gaps = implied_group_gaps(-0.41, &[(-0.30, vec![0.5])]);
        assert!((gaps[0] - (-0.22)).abs() < 1e-15);
    }

    #[test]
    fn chain_matches_three_measure_expansion() {
        // written-out k = 3 solution
        let (phi, g1, g2) = (1.3, 0.9, 0.7);
        let (e1, e2, e3) = (0.6, 0.4, -0.8);
        let (d1, d2, d3, d4) = (0.2, 0.35, -0.5, 1.1);
        let gaps = implied_group_gaps(
            phi,
            &[(g1, vec![g2]), (e1, vec![e2, e3]), (d1, vec![d2, d3, d4])],
        );
        let a1 = (phi - g1) / g2;
        let a2 = ((g1 - e1) + (1.0 - e2 / g2) * (phi - g1)) / e3;
        let a3 = (phi - d1 - d2 * a1 - d3 * a2) / d4;
        for (g, want) in gaps.iter().zip([a1, a2, a3]) {
            assert!((g - want).abs() < 1e-14, "{g} vs {want}");
        }
    }
}
