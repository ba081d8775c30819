//! Bootstrap inference and the proportion of a disparity removed.

mod bootstrap;
mod proportion;

pub use bootstrap::{
    bootstrap, bootstrap_around, bootstrap_statistic, resample_indices, summarize_statistic, BootstrapOptions,
    BootstrapSummary, QuantitySummary, Replicates, DEFAULT_REPLICATES, MAX_FAILURE_SHARE,
};
pub use proportion::{proportion_reduced, ProportionScale};
