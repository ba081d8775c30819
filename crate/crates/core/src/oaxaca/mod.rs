//! Oaxaca-Blinder decompositions from group-stratified regressions, and the
//! mapping of their terms onto the P1-P4 interventions.

mod set3;

pub use set3::interaction_model_formulas;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{DecompositionEstimate, Scale};
use crate::parametric::analysis_rows;
use crate::regression::{fit_ols, CoefficientSet, DesignMatrix, Term};
use crate::spec::{AnalysisSpec, OutcomeFamily, Proposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ObMode {
    Marginal,
    Conditional,
}

/// Which group's slopes weight the mean differences in the explained part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceCoefficients {
    #[default]
    Group1,
    Group0,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObOptions {
    pub reference: ReferenceCoefficients,
    /// Values for conditioning variables; unlisted ones use the group-0 mean.
    pub profile: Vec<(String, f64)>,
}

/// A labelled additive component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObResult {
    pub mode: ObMode,
    pub reference: ReferenceCoefficients,
    pub total_gap: f64,
    pub explained: f64,
    /// One entry per explanatory variable.
    pub explained_terms: Vec<Component>,
    pub unexplained: f64,
    /// Intercept gap, then one slope-gap term per explanatory variable, then
    /// one per conditioning variable.
    pub unexplained_terms: Vec<Component>,
    /// Conditioning values the decomposition is evaluated at.
    pub profile: Vec<Component>,
}

impl ObResult {
    pub fn explained_for(&self, label: &str) -> Result<f64> {
        self.explained_terms
            .iter()
            .find(|t| t.label == label)
            .map(|t| t.value)
            .ok_or_else(|| Error::UnknownColumn(label.to_string()))
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn fit_group(d: &Dataset, rows: &[usize], response: &str, regressors: &[String]) -> Result<CoefficientSet> {
    let terms: Vec<Term> = regressors.iter().map(|c| Term::col(c)).collect();
    let x = DesignMatrix::from_dataset(d, rows, &terms)?;
    fit_ols(&x, &d.values_at(response, rows)?)
}

/// Prediction of `coefs` (intercept, then one slope per name) at `values`.
fn predict(coefs: &CoefficientSet, values: &[f64]) -> f64 {
    let v = coefs.values();
    v[0] + v[1..].iter().zip(values).map(|(b, x)| b * x).sum::<f64>()
}

/// Decomposes the outcome gap between groups at a covariate profile.
///
/// Group means of each explanatory variable are predictions from a group-wise
/// regression on the conditioning variables, so with no conditioning
/// variables they are plain group means and the result is the marginal
/// decomposition.
pub fn oaxaca_decompose(
    d: &Dataset,
    outcome: &str,
    group: &str,
    explanatory: &[String],
    conditioning: &[String],
    options: &ObOptions,
) -> Result<ObResult> {
    let mut cols = vec![outcome.to_string(), group.to_string()];
    cols.extend(explanatory.iter().cloned());
    cols.extend(conditioning.iter().cloned());
    let rows = d.complete_rows(&cols)?;
    decompose_rows(d, &rows, outcome, group, explanatory, conditioning, options)
}

pub(crate) fn decompose_rows(
    d: &Dataset,
    rows: &[usize],
    outcome: &str,
    group: &str,
    explanatory: &[String],
    conditioning: &[String],
    options: &ObOptions,
) -> Result<ObResult> {
    if explanatory.is_empty() {
        return Err(Error::InvalidSpec("at least one explanatory variable is required".into()));
    }
    let (g0, g1) = d.group_rows(group, rows)?;
    if g0.is_empty() {
        return Err(Error::EmptyGroup(0));
    }
    if g1.is_empty() {
        return Err(Error::EmptyGroup(1));
    }
    let profile: Vec<f64> = conditioning
        .iter()
        .map(|c| match options.profile.iter().find(|(k, _)| k == c) {
            Some((_, v)) => Ok(*v),
            None => Ok(mean(&d.values_at(c, &g0)?)),
        })
        .collect::<Result<_>>()?;

    let mut regressors = explanatory.to_vec();
    regressors.extend(conditioning.iter().cloned());
    let b0 = fit_group(d, &g0, outcome, &regressors)?;
    let b1 = fit_group(d, &g1, outcome, &regressors)?;

    let k = explanatory.len();
    let mut v0 = Vec::with_capacity(k);
    let mut v1 = Vec::with_capacity(k);
    for v in explanatory {
        v0.push(predict(&fit_group(d, &g0, v, conditioning)?, &profile));
        v1.push(predict(&fit_group(d, &g1, v, conditioning)?, &profile));
    }

    let (s0, s1) = (b0.values(), b1.values());
    let weights = match options.reference {
        ReferenceCoefficients::Group1 => s1,
        ReferenceCoefficients::Group0 => s0,
    };
    // coefficient gaps are weighted by the other group's means
    let gap_means = match options.reference {
        ReferenceCoefficients::Group1 => &v0,
        ReferenceCoefficients::Group0 => &v1,
    };
    let explained_terms: Vec<Component> = explanatory
        .iter()
        .enumerate()
        .map(|(j, v)| Component {
            label: v.clone(),
            value: weights[j + 1] * (v1[j] - v0[j]),
        })
        .collect();
    let mut unexplained_terms = vec![Component {
        label: "(intercept)".into(),
        value: s1[0] - s0[0],
    }];
    for (j, v) in explanatory.iter().enumerate() {
        unexplained_terms.push(Component {
            label: v.clone(),
            value: (s1[j + 1] - s0[j + 1]) * gap_means[j],
        });
    }
    for (i, c) in conditioning.iter().enumerate() {
        let j = k + 1 + i;
        unexplained_terms.push(Component {
            label: c.clone(),
            value: (s1[j] - s0[j]) * profile[i],
        });
    }
    let explained: f64 = explained_terms.iter().map(|t| t.value).sum();
    let unexplained: f64 = unexplained_terms.iter().map(|t| t.value).sum();
    let mut at1 = v1.clone();
    at1.extend_from_slice(&profile);
    let mut at0 = v0.clone();
    at0.extend_from_slice(&profile);
    let total_gap = predict(&b1, &at1) - predict(&b0, &at0);
    Ok(ObResult {
        mode: if conditioning.is_empty() {
            ObMode::Marginal
        } else {
            ObMode::Conditional
        },
        reference: options.reference,
        total_gap,
        explained,
        explained_terms,
        unexplained,
        unexplained_terms,
        profile: conditioning
            .iter()
            .zip(&profile)
            .map(|(c, v)| Component {
                label: c.clone(),
                value: *v,
            })
            .collect(),
    })
}

/// The early-variable value P2 conditions on: the spec's value, or else the
/// group-1 mean.
pub(crate) fn p2_anchor(d: &Dataset, spec: &AnalysisSpec, rows: &[usize]) -> Result<f64> {
    match spec.conditioning_value_x {
        Some(v) => Ok(v),
        None => {
            let (_, g1) = d.group_rows(&spec.bindings.group, rows)?;
            Ok(mean(&d.values_at(&spec.bindings.early[0], &g1)?))
        }
    }
}

pub(crate) fn check_ob_spec(spec: &AnalysisSpec) -> Result<&str> {
    if spec.bindings.confounder.is_some() || spec.proposition.is_time_dependent() {
        return Err(Error::TimeDependentConfounding);
    }
    if spec.outcome_family != OutcomeFamily::Continuous {
        return Err(Error::InvalidSpec(
            "Oaxaca-Blinder routes need a continuous outcome".into(),
        ));
    }
    match spec.bindings.early.as_slice() {
        [x] => Ok(x),
        _ => Err(Error::InvalidSpec(
            "Oaxaca-Blinder routes need exactly one early column".into(),
        )),
    }
}

/// P1-P4 from Oaxaca-Blinder terms with group-1 reference coefficients,
/// evaluated at the group-0 covariate means.
pub fn proposition_via_oaxaca(d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
    let x = check_ob_spec(spec)?.to_string();
    let b = &spec.bindings;
    let rows = analysis_rows(d, spec)?;
    let opts = ObOptions::default();
    let (ob, residual, reduction) = match spec.proposition {
        Proposition::P1 => {
            let ob = decompose_rows(d, &rows, &b.outcome, &b.group, &[x], &b.covariates, &opts)?;
            let (res, red) = (ob.unexplained, ob.explained);
            (ob, res, red)
        }
        Proposition::P2 => {
            let anchor = p2_anchor(d, spec, &rows)?;
            let mut cond = vec![x.clone()];
            cond.extend(b.covariates.iter().cloned());
            let opts = ObOptions {
                profile: vec![(x, anchor)],
                ..ObOptions::default()
            };
            let ob = decompose_rows(d, &rows, &b.outcome, &b.group, &[b.target.clone()], &cond, &opts)?;
            let (res, red) = (ob.unexplained, ob.explained);
            (ob, res, red)
        }
        Proposition::P3 | Proposition::P4 => {
            let vars = [x.clone(), b.target.clone()];
            let ob = decompose_rows(d, &rows, &b.outcome, &b.group, &vars, &b.covariates, &opts)?;
            if spec.proposition == Proposition::P3 {
                let (res, red) = (ob.unexplained, ob.explained);
                (ob, res, red)
            } else {
                let via_m = ob.explained_for(&b.target)?;
                let via_x = ob.explained_for(&x)?;
                let res = ob.unexplained + via_x;
                (ob, res, via_m)
            }
        }
        _ => return Err(Error::TimeDependentConfounding),
    };
    Ok(DecompositionEstimate::new(
        spec.proposition,
        spec.estimator,
        Scale::Additive,
        ob.total_gap,
        residual,
        reduction,
    ))
}
