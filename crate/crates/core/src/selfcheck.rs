//! Cross-family equivalence checks on generated data.

use serde::Serialize;

use crate::data::Dataset;
use crate::error::Result;
use crate::estimate::DecompositionEstimate;
use crate::oaxaca::{interaction_model_formulas, proposition_via_oaxaca};
use crate::parametric::{
    decompose_product_coefficients, decompose_successive_linear, saturated_standardization,
};
use crate::plugin::{plugin_mu, Standardized};
use crate::regression::{fit_ols, DesignMatrix, Term};
use crate::spec::{AnalysisSpec, Bindings, Estimator, Proposition};
use crate::synthetic::{generate, ConfounderEquation, CovariateEquation, GeneratorMode, StructuralParams};

/// The estimators under test. Every method defaults to the library
/// implementation; a test can override one to inject a fault.
pub trait EstimatorSuite: Sync {
    fn successive(&self, d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
        decompose_successive_linear(d, spec)
    }
    fn product(&self, d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
        decompose_product_coefficients(d, spec)
    }
    fn plugin(&self, d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
        plugin_mu(d, spec)
    }
    fn saturated(&self, d: &Dataset, spec: &AnalysisSpec) -> Result<Standardized> {
        saturated_standardization(d, spec)
    }
    fn oaxaca(&self, d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
        proposition_via_oaxaca(d, spec)
    }
    fn interaction_formulas(&self, d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
        interaction_model_formulas(d, spec)
    }
}

/// The shipped estimators.
pub struct LibrarySuite;

impl EstimatorSuite for LibrarySuite {}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfcheckReport {
    pub checks: Vec<IdentityCheck>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// `|a - b|` relative to the larger magnitude, floored at `floor`.
pub fn relative_deviation(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

fn estimate_deviation(a: &DecompositionEstimate, b: &DecompositionEstimate) -> f64 {
    let floor = a.initial.abs().max(1e-12);
    [
        relative_deviation(a.initial, b.initial, floor),
        relative_deviation(a.residual, b.residual, floor),
        relative_deviation(a.reduction, b.reduction, floor),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

const SEEDS: [u64; 5] = [11, 23, 37, 41, 53];

fn continuous_params() -> StructuralParams {
    StructuralParams {
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
    }
}

fn discrete_params(constant_confounder: bool) -> StructuralParams {
    StructuralParams {
        group_prevalence: 0.5,
        x_intercept: 0.6,
        x_group: -0.3,
        m_intercept: 0.5,
        m_group: -0.2,
        m_early: 0.2,
        y_group: -0.5,
        y_early: 0.6,
        y_target: 0.8,
        mode: GeneratorMode::BinaryXm,
        covariate: Some(CovariateEquation {
            prevalence: 0.4,
            on_early: 0.1,
            on_target: 0.1,
            on_outcome: 0.3,
        }),
        confounder: constant_confounder.then_some(ConfounderEquation {
            intercept: 1.0,
            group: 0.0,
            early: 0.0,
            sd: 0.0,
            on_target: 0.0,
            on_outcome: 0.0,
        }),
        ..Default::default()
    }
}

struct Check {
    name: &'static str,
    tolerance: f64,
    max: f64,
    error: Option<String>,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check {
            name,
            tolerance,
            max: 0.0,
            error: None,
        }
    }

    fn observe(&mut self, r: Result<f64>) {
        match r {
            Ok(v) if v.is_nan() => self.max = f64::INFINITY,
            Ok(v) => self.max = self.max.max(v),
            Err(e) => {
                if self.error.is_none() {
                    self.error = Some(e.to_string());
                }
            }
        }
    }

    fn finish(self) -> IdentityCheck {
        IdentityCheck {
            name: self.name.to_string(),
            max_deviation: self.max,
            tolerance: self.tolerance,
            passed: self.error.is_none() && self.max <= self.tolerance,
            error: self.error,
        }
    }
}

/// Group coefficient of `y ~ r + c` minus its omitted-variable reconstruction
/// from `y ~ r + x + c` and `x ~ r + c`, relative.
fn nested_identity_deviation(d: &Dataset) -> Result<f64> {
    let rows: Vec<usize> = (0..d.n_rows()).collect();
    let fit = |response: &str, terms: &[&str]| {
        let t: Vec<Term> = terms.iter().map(|s| Term::col(s)).collect();
        fit_ols(&DesignMatrix::from_dataset(d, &rows, &t)?, &d.dense(response)?)
    };
    let reduced = fit("y", &["r", "c"])?.coef("r")?;
    let full = fit("y", &["r", "x", "c"])?;
    let aux = fit("x", &["r", "c"])?.coef("r")?;
    let rebuilt = full.coef("r")? + full.coef("x")? * aux;
    Ok(relative_deviation(reduced, rebuilt, 1e-12))
}

/// Runs every identity on a fixed set of generated datasets.
pub fn selfcheck(suite: &dyn EstimatorSuite) -> SelfcheckReport {
    let mut nested = Check::new("nested-OLS omitted-variable identity", 1e-8);
    let mut additivity = Check::new("residual + reduction = initial", 1e-10);
    let mut families = Check::new("successive = product coefficients (P1-P4)", 1e-8);
    let mut saturated = Check::new("plug-in = saturated-model standardization (P1-P4)", 1e-8);
    let mut oaxaca = Check::new("Oaxaca-Blinder = interaction-model formulas (P1-P4)", 1e-8);
    let mut collapse = Check::new("constant confounder: P5-P7 = P2-P4 exactly", 0.0);

    for &seed in &SEEDS {
        let cont = match generate(&continuous_params(), 400, seed) {
            Ok(d) => d,
            Err(e) => {
                nested.observe(Err(e));
                continue;
            }
        };
        nested.observe(nested_identity_deviation(&cont));
        let bindings = match Bindings::from_roles(&cont) {
            Ok(b) => b,
            Err(e) => {
                families.observe(Err(e));
                continue;
            }
        };
        for prop in Proposition::BASE {
            let spec = AnalysisSpec::new(prop, Estimator::Successive, bindings.clone());
            let s = suite.successive(&cont, &spec);
            let p = suite.product(&cont, &spec.clone().with_estimator(Estimator::Product));
            match (&s, &p) {
                (Ok(s), Ok(p)) => {
                    additivity.observe(Ok(s.combination_error().max(p.combination_error())));
                    families.observe(Ok(estimate_deviation(s, p)));
                }
                (Err(e), _) | (_, Err(e)) => families.observe(Err(e.clone())),
            }
            let ob = suite.oaxaca(&cont, &spec);
            let set3 = suite.interaction_formulas(&cont, &spec);
            match (ob, set3) {
                (Ok(a), Ok(b)) => {
                    additivity.observe(Ok(a.combination_error().max(b.combination_error())));
                    oaxaca.observe(Ok(estimate_deviation(&a, &b)));
                }
                (Err(e), _) | (_, Err(e)) => oaxaca.observe(Err(e)),
            }
        }

        let disc = generate(&discrete_params(true), 600, seed).and_then(|d| {
            let b = Bindings::from_roles(&d)?;
            Ok((d, b))
        });
        let (disc, bindings) = match disc {
            Ok(v) => v,
            Err(e) => {
                saturated.observe(Err(e));
                continue;
            }
        };
        for prop in Proposition::BASE {
            let spec = AnalysisSpec::new(prop, Estimator::Plugin, bindings.clone());
            let pl = suite.plugin(&disc, &spec);
            let sat = suite.saturated(&disc, &spec);
            match (pl, sat) {
                (Ok(pl), Ok(sat)) => {
                    additivity.observe(Ok(pl.combination_error()));
                    let floor = pl.initial.abs().max(1e-12);
                    let dev = [
                        relative_deviation(pl.residual, sat.mu - sat.mean0, floor),
                        relative_deviation(pl.reduction, sat.mean1 - sat.mu, floor),
                        relative_deviation(pl.initial, sat.mean1 - sat.mean0, floor),
                    ]
                    .into_iter()
                    .fold(0.0, f64::max);
                    saturated.observe(Ok(dev));
                }
                (Err(e), _) | (_, Err(e)) => saturated.observe(Err(e)),
            }
        }
        for (td, base) in [
            (Proposition::P5, Proposition::P2),
            (Proposition::P6, Proposition::P3),
            (Proposition::P7, Proposition::P4),
        ] {
            let a = suite.plugin(&disc, &AnalysisSpec::new(td, Estimator::Plugin, bindings.clone()));
            let b = suite.plugin(&disc, &AnalysisSpec::new(base, Estimator::Plugin, bindings.clone()));
            collapse.observe(a.and_then(|a| {
                let b = b?;
                let same = a.initial == b.initial && a.residual == b.residual && a.reduction == b.reduction;
                Ok(if same { 0.0 } else { estimate_deviation(&a, &b).max(f64::MIN_POSITIVE) })
            }));
        }
    }
    SelfcheckReport {
        checks: vec![
            nested.finish(),
            additivity.finish(),
            families.finish(),
            saturated.finish(),
            oaxaca.finish(),
            collapse.finish(),
        ],
    }
}
