//! Decomposition of a group disparity in an outcome into the part removed by
//! a hypothetical intervention on a target variable and the part that remains.

pub mod data;
pub mod error;
pub mod estimate;
pub mod inference;
pub mod oaxaca;
pub mod parametric;
pub mod plugin;
pub mod regression;
mod runner;
pub mod selfcheck;
pub mod spec;
pub mod synthetic;

pub use data::{Dataset, Role};
pub use error::{Error, Result};
pub use estimate::{DecompositionEstimate, Scale, Warning};
pub use inference::{bootstrap, BootstrapOptions, BootstrapSummary, QuantitySummary};
pub use runner::decompose;
pub use spec::{AnalysisSpec, Aggregation, Bindings, Estimator, OutcomeFamily, Proposition, SpecOptions};
