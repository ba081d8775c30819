//! Least-squares and logistic fits on labelled design matrices.

mod design;
mod logistic;
mod ols;
mod qr;

pub use design::{DesignMatrix, Term, INTERCEPT};
pub use logistic::{fit_logistic, MAX_ITERATIONS};
pub use ols::fit_ols;
pub use qr::RANK_TOL;

use serde::Serialize;

use crate::error::{Error, Result};

/// Goodness-of-fit details that depend on the model family.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FitSummary {
    Ols {
        /// RSS / (n - p).
        residual_variance: f64,
        n: usize,
    },
    Logistic {
        deviance: f64,
        iterations: usize,
    },
}

/// One coefficient per design column, keyed by the column label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSet {
    labels: Vec<String>,
    values: Vec<f64>,
    pub summary: FitSummary,
    pub converged: bool,
}

impl CoefficientSet {
    pub(crate) fn new(labels: Vec<String>, values: Vec<f64>, summary: FitSummary, converged: bool) -> Self {
        debug_assert_eq!(labels.len(), values.len());
        CoefficientSet {
            labels,
            values,
            summary,
            converged,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Coefficients in design-column order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.values[i])
    }

    /// Like [`get`](Self::get) but an unknown label is an error.
    pub fn coef(&self, label: &str) -> Result<f64> {
        self.get(label)
            .ok_or_else(|| Error::UnknownColumn(label.to_string()))
    }

    pub fn intercept(&self) -> f64 {
        self.values[0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.labels.iter().map(String::as_str).zip(self.values.iter().copied())
    }
}
