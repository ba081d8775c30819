use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::DecompositionEstimate;
use crate::runner::decompose;
use crate::spec::AnalysisSpec;

pub const DEFAULT_REPLICATES: usize = 1000;

/// Largest tolerated share of failed replicates.
pub const MAX_FAILURE_SHARE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Resample within each group separately, keeping group sizes fixed.
    #[serde(default)]
    pub stratify: bool,
}

fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            stratify: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantitySummary {
    /// Full-sample value.
    pub estimate: f64,
    /// Sample standard deviation over successful replicates.
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    /// Replicates contributing a finite value.
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapSummary {
    pub replicates: usize,
    pub seed: u64,
    pub stratified: bool,
    pub initial: QuantitySummary,
    pub residual: QuantitySummary,
    pub reduction: QuantitySummary,
    pub proportion_reduced: QuantitySummary,
    pub failed: usize,
    /// Failure message to count.
    pub failure_reasons: BTreeMap<String, usize>,
}

/// Row indices of replicate `replicate`: a pure function of
/// `(seed, replicate)`, so replicates can run in any order.
///
/// With `strata`, each stratum's rows are resampled within the stratum and
/// placed in stratum order.
pub fn resample_indices(n: usize, strata: Option<&[Vec<usize>]>, seed: u64, replicate: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    match strata {
        None => (0..n).map(|_| rng.random_range(0..n)).collect(),
        Some(groups) => groups
            .iter()
            .flat_map(|g| {
                (0..g.len())
                    .map(|_| g[rng.random_range(0..g.len())])
                    .collect::<Vec<_>>()
            })
            .collect(),
    }
}

/// Linear-interpolation percentile of sorted values, `p` in [0, 1].
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn summarize(estimate: f64, values: impl Iterator<Item = f64>) -> QuantitySummary {
    let mut v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    if v.len() < 2 {
        return QuantitySummary {
            estimate,
            se: f64::NAN,
            lower: f64::NAN,
            upper: f64::NAN,
            used: v.len(),
        };
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let se = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    v.sort_by(f64::total_cmp);
    QuantitySummary {
        estimate,
        se,
        lower: percentile(&v, 0.025),
        upper: percentile(&v, 0.975),
        used: v.len(),
    }
}

/// Replicate values of an arbitrary statistic, one vector per replicate.
pub struct Replicates {
    pub values: Vec<Vec<f64>>,
    pub failed: usize,
    pub failure_reasons: BTreeMap<String, usize>,
}

/// Recomputes `statistic` on resampled copies of `d`.
///
/// Failing replicates are counted and dropped; more than 10% failures is an
/// error.
pub fn bootstrap_statistic<F>(
    d: &Dataset,
    stratify_by: Option<&str>,
    options: &BootstrapOptions,
    statistic: F,
) -> Result<Replicates>
where
    F: Fn(&Dataset) -> Result<Vec<f64>> + Sync,
{
    if options.replicates < 2 {
        return Err(Error::InvalidReplicates(options.replicates));
    }
    let strata = match stratify_by {
        Some(g) => {
            let all: Vec<usize> = (0..d.n_rows()).collect();
            let (g0, g1) = d.group_rows(g, &all)?;
            Some(vec![g0, g1])
        }
        None => None,
    };
    let outcomes: Vec<Result<Vec<f64>>> = (0..options.replicates)
        .into_par_iter()
        .map(|b| {
            let idx = resample_indices(d.n_rows(), strata.as_deref(), options.seed, b);
            statistic(&d.take_rows(&idx))
        })
        .collect();
    let mut values = Vec::with_capacity(outcomes.len());
    let mut failure_reasons = BTreeMap::new();
    for o in outcomes {
        match o {
            Ok(v) => values.push(v),
            Err(e) => *failure_reasons.entry(e.to_string()).or_insert(0) += 1,
        }
    }
    let failed = options.replicates - values.len();
    if failed as f64 > MAX_FAILURE_SHARE * options.replicates as f64 {
        return Err(Error::TooManyFailures {
            failed,
            total: options.replicates,
        });
    }
    Ok(Replicates {
        values,
        failed,
        failure_reasons,
    })
}

/// Standard errors and percentile intervals for one decomposition run.
pub fn bootstrap(d: &Dataset, spec: &AnalysisSpec, options: &BootstrapOptions) -> Result<BootstrapSummary> {
    let point = decompose(d, spec)?;
    bootstrap_around(d, spec, options, &point)
}

/// As [`bootstrap`], reusing an already computed full-sample estimate.
pub fn bootstrap_around(
    d: &Dataset,
    spec: &AnalysisSpec,
    options: &BootstrapOptions,
    point: &DecompositionEstimate,
) -> Result<BootstrapSummary> {
    let stratify = options.stratify.then_some(spec.bindings.group.as_str());
    let reps = bootstrap_statistic(d, stratify, options, |sample| {
        let e = decompose(sample, spec)?;
        Ok(vec![e.initial, e.residual, e.reduction, e.proportion_reduced])
    })?;
    let column = |j: usize| reps.values.iter().map(move |v| v[j]);
    Ok(BootstrapSummary {
        replicates: options.replicates,
        seed: options.seed,
        stratified: options.stratify,
        initial: summarize(point.initial, column(0)),
        residual: summarize(point.residual, column(1)),
        reduction: summarize(point.reduction, column(2)),
        proportion_reduced: summarize(point.proportion_reduced, column(3)),
        failed: reps.failed,
        failure_reasons: reps.failure_reasons,
    })
}

/// Summary of one statistic from [`bootstrap_statistic`] output.
pub fn summarize_statistic(estimate: f64, reps: &Replicates, index: usize) -> QuantitySummary {
    summarize(estimate, reps.values.iter().map(|v| v[index]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert!((percentile(&v, 0.1) - 1.4).abs() < 1e-15);
    }

    #[test]
    fn indices_depend_only_on_seed_and_replicate() {
        let a = resample_indices(50, None, 7, 3);
        let b = resample_indices(50, None, 7, 3);
        assert_eq!(a, b);
        assert_ne!(a, resample_indices(50, None, 7, 4));
        assert!(a.iter().all(|&i| i < 50));
    }

    #[test]
    fn stratified_keeps_group_sizes() {
        let strata = vec![vec![0, 1, 2], vec![3, 4]];
        let idx = resample_indices(5, Some(&strata), 1, 0);
        assert!(idx[..3].iter().all(|i| *i < 3));
        assert!(idx[3..].iter().all(|i| *i >= 3));
    }

    #[test]
    fn rejects_single_replicate() {
        let d = Dataset::from_dense(vec![("y", vec![1.0, 2.0])]).unwrap();
        let opts = BootstrapOptions {
            replicates: 1,
            ..Default::default()
        };
        assert!(matches!(
            bootstrap_statistic(&d, None, &opts, |_| Ok(vec![0.0])),
            Err(Error::InvalidReplicates(1))
        ));
    }
}
