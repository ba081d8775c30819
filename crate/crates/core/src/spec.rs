//! Declarative description of one decomposition run.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Role};
use crate::error::{Error, Result};

/// Which hypothetical intervention is evaluated.
///
/// P1 equalizes the early variables, P2 the target within early-variable
/// strata, P3 both jointly, P4 the target marginally. P5-P7 are P2-P4
/// identified through a time-dependent confounder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Proposition {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
}

impl Proposition {
    pub const BASE: [Proposition; 4] = [Proposition::P1, Proposition::P2, Proposition::P3, Proposition::P4];
    pub const ALL: [Proposition; 7] = [
        Proposition::P1,
        Proposition::P2,
        Proposition::P3,
        Proposition::P4,
        Proposition::P5,
        Proposition::P6,
        Proposition::P7,
    ];

    pub fn is_time_dependent(self) -> bool {
        matches!(self, Proposition::P5 | Proposition::P6 | Proposition::P7)
    }

    /// The P1-P4 intervention a time-dependent proposition corresponds to.
    pub fn base(self) -> Proposition {
        match self {
            Proposition::P5 => Proposition::P2,
            Proposition::P6 => Proposition::P3,
            Proposition::P7 => Proposition::P4,
            p => p,
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Estimator {
    /// Differences of group coefficients across nested outcome models.
    Successive,
    /// Products of coefficients from outcome, target and early-variable models.
    Product,
    /// Nonparametric standardization over discrete strata.
    Plugin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OutcomeFamily {
    #[default]
    Continuous,
    RareBinary,
}

/// Distribution used to average covariate-stratum results into one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// P(c | R=1).
    #[default]
    Group1,
    /// P(c | R=0).
    Group0,
    /// P(c).
    Pooled,
}

/// Column names playing each role in a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bindings {
    pub outcome: String,
    pub group: String,
    /// Covariates followed by missing-indicator columns.
    #[serde(default)]
    pub covariates: Vec<String>,
    pub early: Vec<String>,
    pub target: String,
    #[serde(default)]
    pub confounder: Option<String>,
}

impl Bindings {
    /// Reads bindings from the dataset's role declarations.
    pub fn from_roles(d: &Dataset) -> Result<Bindings> {
        let single = |role: Role| -> Result<String> {
            match d.role(role) {
                [one] => Ok(one.clone()),
                [] => Err(Error::InvalidSpec(format!("no {role} column declared"))),
                _ => Err(Error::InvalidSpec(format!("more than one {role} column declared"))),
            }
        };
        let mut covariates = d.role(Role::Covariate).to_vec();
        covariates.extend(d.role(Role::MissingIndicator).iter().cloned());
        let confounder = match d.role(Role::ConfounderL) {
            [] => None,
            [one] => Some(one.clone()),
            _ => {
                return Err(Error::InvalidSpec(
                    "at most one confounder_l column may be declared".into(),
                ))
            }
        };
        Ok(Bindings {
            outcome: single(Role::Outcome)?,
            group: single(Role::Group)?,
            covariates,
            early: d.role(Role::Early).to_vec(),
            target: single(Role::Target)?,
            confounder,
        })
    }

    /// Every column a run reads, without duplicates.
    pub fn all_columns(&self) -> Vec<String> {
        let mut out = vec![self.outcome.clone(), self.group.clone()];
        out.extend(self.early.iter().cloned());
        out.push(self.target.clone());
        out.extend(self.covariates.iter().cloned());
        out.extend(self.confounder.iter().cloned());
        let mut seen = std::collections::BTreeSet::new();
        out.retain(|c| seen.insert(c.clone()));
        out
    }
}

/// Default cap on distinct levels per stratifying variable.
pub const DEFAULT_MAX_LEVELS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecOptions {
    /// Adds group-by-variable interactions and routes P1-P4 through the
    /// Oaxaca-Blinder formulas.
    #[serde(default)]
    pub interactions: bool,
    #[serde(default)]
    pub aggregation: Aggregation,
    #[serde(default = "default_max_levels")]
    pub max_levels: usize,
}

fn default_max_levels() -> usize {
    DEFAULT_MAX_LEVELS
}

impl Default for SpecOptions {
    fn default() -> Self {
        SpecOptions {
            interactions: false,
            aggregation: Aggregation::default(),
            max_levels: DEFAULT_MAX_LEVELS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSpec {
    pub proposition: Proposition,
    pub estimator: Estimator,
    pub outcome_family: OutcomeFamily,
    pub bindings: Bindings,
    /// For P2/P5: the early-variable stratum to condition on. `None` means the
    /// group-1 mean (parametric and Oaxaca-Blinder routes) or an average over
    /// strata weighted by P(x | R=1, c) (plug-in route).
    #[serde(default)]
    pub conditioning_value_x: Option<f64>,
    #[serde(default)]
    pub options: SpecOptions,
}

impl AnalysisSpec {
    pub fn new(proposition: Proposition, estimator: Estimator, bindings: Bindings) -> Self {
        AnalysisSpec {
            proposition,
            estimator,
            outcome_family: OutcomeFamily::Continuous,
            bindings,
            conditioning_value_x: None,
            options: SpecOptions::default(),
        }
    }

    pub fn with_family(mut self, family: OutcomeFamily) -> Self {
        self.outcome_family = family;
        self
    }

    pub fn with_interactions(mut self, on: bool) -> Self {
        self.options.interactions = on;
        self
    }

    pub fn with_conditioning_x(mut self, x: Option<f64>) -> Self {
        self.conditioning_value_x = x;
        self
    }

    pub fn with_aggregation(mut self, a: Aggregation) -> Self {
        self.options.aggregation = a;
        self
    }

    pub fn with_proposition(mut self, p: Proposition) -> Self {
        self.proposition = p;
        self
    }

    pub fn with_estimator(mut self, e: Estimator) -> Self {
        self.estimator = e;
        self
    }

    /// Checks the structural rules that do not need the data.
    pub fn validate(&self) -> Result<()> {
        let b = &self.bindings;
        if self.proposition.is_time_dependent() {
            if self.estimator != Estimator::Plugin {
                return Err(Error::InvalidSpec(format!(
                    "{} requires estimator PLUGIN",
                    self.proposition
                )));
            }
            if b.confounder.is_none() {
                return Err(Error::InvalidSpec(format!(
                    "{} requires a confounder_l binding",
                    self.proposition
                )));
            }
        }
        if b.early.is_empty() {
            return Err(Error::InvalidSpec("at least one early column is required".into()));
        }
        if self.estimator == Estimator::Product && b.early.len() != 1 {
            return Err(Error::InvalidSpec(
                "PRODUCT requires exactly one early column and one target column".into(),
            ));
        }
        if self.estimator == Estimator::Plugin && b.early.len() != 1 {
            return Err(Error::InvalidSpec(
                "PLUGIN requires exactly one (discrete) early column".into(),
            ));
        }
        if self.options.interactions {
            if b.confounder.is_some() {
                return Err(Error::TimeDependentConfounding);
            }
            if b.early.len() != 1 || self.outcome_family != OutcomeFamily::Continuous {
                return Err(Error::InvalidSpec(
                    "interaction models need one early column and a continuous outcome".into(),
                ));
            }
        }
        let all = b.all_columns();
        let listed = 3 + b.early.len() + b.covariates.len() + usize::from(b.confounder.is_some());
        if all.len() != listed {
            return Err(Error::InvalidSpec("a column is bound to more than one role".into()));
        }
        if self.options.max_levels < 2 {
            return Err(Error::InvalidSpec("max_levels must be at least 2".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bindings() -> Bindings {
        Bindings {
            outcome: "y".into(),
            group: "r".into(),
            covariates: vec![],
            early: vec!["x".into()],
            target: "m".into(),
            confounder: None,
        }
    }

    #[test]
    fn time_dependent_needs_plugin_and_confounder() {
        let spec = AnalysisSpec::new(Proposition::P5, Estimator::Successive, bindings());
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))));
        let mut b = bindings();
        b.confounder = Some("l".into());
        let spec = AnalysisSpec::new(Proposition::P5, Estimator::Successive, b.clone());
        let msg = spec.validate().unwrap_err().to_string();
        assert!(msg.contains("PLUGIN"), "{msg}");
        assert!(AnalysisSpec::new(Proposition::P5, Estimator::Plugin, b).validate().is_ok());
    }

    #[test]
    fn product_needs_single_early_column() {
        let mut b = bindings();
        b.early.push("x2".into());
        let spec = AnalysisSpec::new(Proposition::P4, Estimator::Product, b);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn duplicate_binding_rejected() {
        let mut b = bindings();
        b.covariates.push("x".into());
        let spec = AnalysisSpec::new(Proposition::P1, Estimator::Successive, b);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn base_mapping() {
        assert_eq!(Proposition::P6.base(), Proposition::P3);
        assert_eq!(Proposition::P1.base(), Proposition::P1);
    }
}
