use std::collections::BTreeMap;

use serde::Serialize;

use crate::inference::{proportion_reduced, ProportionScale};
use crate::regression::CoefficientSet;
use crate::spec::{Aggregation, Estimator, Proposition};

/// How initial, residual and reduction combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scale {
    /// initial = residual + reduction.
    Additive,
    /// initial = residual x reduction (rare binary outcome).
    Ratio,
}

impl Scale {
    pub fn proportion_scale(self) -> ProportionScale {
        match self {
            Scale::Additive => ProportionScale::Additive,
            Scale::Ratio => ProportionScale::Relative,
        }
    }
}

/// Conditions attached to an estimate that a reader must see.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// The rare-outcome approximation is poor above 10% prevalence.
    Prevalence { outcome_mean: f64 },
    /// For P2 the initial disparity is conditional on the early variables.
    ConditionalInitial,
    /// Stratum-specific plug-in results were averaged with this weight.
    AggregationConvention { weights: Aggregation },
    /// The initial disparity is too close to its null value for a proportion.
    DegenerateInitial { initial: f64 },
}

/// Outcome of one decomposition run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionEstimate {
    pub proposition: Proposition,
    pub estimator: Estimator,
    pub scale: Scale,
    pub initial: f64,
    pub residual: f64,
    pub reduction: f64,
    /// NaN when the initial disparity is degenerate (see warnings).
    pub proportion_reduced: f64,
    /// Fitted models keyed by formula, e.g. `y ~ r + x + c`.
    pub coefficients: BTreeMap<String, BTreeMap<String, f64>>,
    pub warnings: Vec<Warning>,
}

impl DecompositionEstimate {
    pub fn new(
        proposition: Proposition,
        estimator: Estimator,
        scale: Scale,
        initial: f64,
        residual: f64,
        reduction: f64,
    ) -> Self {
        let mut warnings = Vec::new();
        let proportion = match proportion_reduced(initial, residual, scale.proportion_scale()) {
            Ok(p) => p,
            Err(_) => {
                warnings.push(Warning::DegenerateInitial { initial });
                f64::NAN
            }
        };
        if proposition.base() == Proposition::P2 {
            warnings.push(Warning::ConditionalInitial);
        }
        DecompositionEstimate {
            proposition,
            estimator,
            scale,
            initial,
            residual,
            reduction,
            proportion_reduced: proportion,
            coefficients: BTreeMap::new(),
            warnings,
        }
    }

    pub fn with_model(mut self, formula: &str, coefs: &CoefficientSet) -> Self {
        self.coefficients.insert(
            formula.to_string(),
            coefs.iter().map(|(k, v)| (k.to_string(), v)).collect(),
        );
        self
    }

    pub fn with_warning(mut self, w: Warning) -> Self {
        self.warnings.push(w);
        self
    }

    /// How far the three quantities are from combining exactly: absolute for
    /// additive estimates, relative for ratio estimates.
    pub fn combination_error(&self) -> f64 {
        match self.scale {
            Scale::Additive => (self.residual + self.reduction - self.initial).abs(),
            Scale::Ratio => ((self.residual * self.reduction - self.initial) / self.initial).abs(),
        }
    }
}
