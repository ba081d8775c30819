//! Nonparametric standardization (g-formula) over discrete strata.

mod strata;

pub use strata::{Cell, Level, StrataColumns, StratumTable};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{DecompositionEstimate, Scale, Warning};
use crate::parametric::analysis_rows;
use crate::spec::{Aggregation, AnalysisSpec, Estimator, OutcomeFamily, Proposition};

/// Stratum-level pieces: the standardized mean and the two observed group
/// means it is contrasted with.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Standardized {
    pub mu: f64,
    pub mean0: f64,
    pub mean1: f64,
}

impl Standardized {
    fn add_scaled(&mut self, w: f64, o: Standardized) {
        self.mu += w * o.mu;
        self.mean0 += w * o.mean0;
        self.mean1 += w * o.mean1;
    }
}

/// Builds the stratum table for a spec's analysis rows.
pub fn stratum_table(d: &Dataset, spec: &AnalysisSpec) -> Result<StratumTable> {
    let b = &spec.bindings;
    let [early] = b.early.as_slice() else {
        return Err(Error::InvalidSpec(
            "PLUGIN requires exactly one (discrete) early column".into(),
        ));
    };
    let rows = analysis_rows(d, spec)?;
    let confounder = if spec.proposition.is_time_dependent() {
        b.confounder.as_deref()
    } else {
        None
    };
    StratumTable::build(
        d,
        &rows,
        StrataColumns {
            outcome: &b.outcome,
            group: &b.group,
            early,
            target: &b.target,
            covariates: &b.covariates,
            confounder,
        },
        spec.options.max_levels,
    )
}

/// Plug-in estimate for P1-P4.
pub fn plugin_mu(d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
    if spec.proposition.is_time_dependent() {
        return plugin_mu_timedep(d, spec);
    }
    Ok(to_estimate(spec, plugin_components(d, spec)?))
}

/// Plug-in estimate for P5-P7: the group-1 outcome mean in each (x, m, c)
/// cell is replaced by its average over the group-1 confounder distribution
/// P(l | R=1, x, c).
pub fn plugin_mu_timedep(d: &Dataset, spec: &AnalysisSpec) -> Result<DecompositionEstimate> {
    if !spec.proposition.is_time_dependent() {
        return Err(Error::InvalidSpec(format!(
            "{} is not a time-dependent proposition",
            spec.proposition
        )));
    }
    if spec.bindings.confounder.is_none() {
        return Err(Error::InvalidSpec(format!(
            "{} requires a confounder_l binding",
            spec.proposition
        )));
    }
    Ok(to_estimate(spec, plugin_components(d, spec)?))
}

/// The standardized mean and reference means behind a plug-in estimate.
pub fn plugin_components(d: &Dataset, spec: &AnalysisSpec) -> Result<Standardized> {
    let t = stratum_table(d, spec)?;
    if spec.proposition.is_time_dependent() {
        standardize(&t, spec.proposition.base(), spec, &|c, x, m| {
            confounder_averaged(&t, c, x, m)
        })
    } else {
        standardize(&t, spec.proposition, spec, &|c, x, m| t.mean_rcxm(1, c, x, m))
    }
}

fn confounder_averaged(t: &StratumTable, c: usize, x: Level, m: Level) -> Result<f64> {
    let mut acc = 0.0;
    for (l, pl) in t.dist_l_given_x(1, c, x) {
        acc += t.mean_rcxml(1, c, x, m, l)? * pl;
    }
    Ok(acc)
}

type OutcomeMean<'a> = dyn Fn(usize, Level, Level) -> Result<f64> + 'a;

/// Standardized mean within covariate stratum `c`. `outcome(c, x, m)` gives
/// the group-1 outcome mean used for the target-dependent propositions.
fn stratum_value(
    t: &StratumTable,
    prop: Proposition,
    c: usize,
    x_star: Option<Level>,
    outcome: &OutcomeMean<'_>,
) -> Result<Standardized> {
    match prop {
        Proposition::P1 => {
            let mut mu = 0.0;
            for (x, px) in t.dist_x(0, c) {
                mu += t.mean_rcx(1, c, x)? * px;
            }
            Ok(Standardized {
                mu,
                mean0: t.mean_rc(0, c)?,
                mean1: t.mean_rc(1, c)?,
            })
        }
        Proposition::P2 => {
            let at = |x: Level| -> Result<Standardized> {
                let pm = t.dist_m_given_x(0, c, x);
                if pm.is_empty() {
                    return Err(Error::EmptyStratum {
                        cell: t.describe(0, c, &[("x", x)]),
                    });
                }
                let mut mu = 0.0;
                for (m, p) in pm {
                    mu += outcome(c, x, m)? * p;
                }
                Ok(Standardized {
                    mu,
                    mean0: t.mean_rcx(0, c, x)?,
                    mean1: t.mean_rcx(1, c, x)?,
                })
            };
            match x_star {
                Some(x) => at(x),
                None => {
                    let mut acc = Standardized::default();
                    for (x, px) in t.dist_x(1, c) {
                        acc.add_scaled(px, at(x)?);
                    }
                    Ok(acc)
                }
            }
        }
        Proposition::P3 => {
            let mut mu = 0.0;
            for (x, px) in t.dist_x(0, c) {
                let mut inner = 0.0;
                for (m, pm) in t.dist_m_given_x(0, c, x) {
                    inner += outcome(c, x, m)? * pm;
                }
                mu += inner * px;
            }
            Ok(Standardized {
                mu,
                mean0: t.mean_rc(0, c)?,
                mean1: t.mean_rc(1, c)?,
            })
        }
        _ => {
            let pm = t.dist_m(0, c);
            let mut mu = 0.0;
            for (x, px) in t.dist_x(1, c) {
                let mut inner = 0.0;
                for &(m, p) in &pm {
                    inner += outcome(c, x, m)? * p;
                }
                mu += inner * px;
            }
            Ok(Standardized {
                mu,
                mean0: t.mean_rc(0, c)?,
                mean1: t.mean_rc(1, c)?,
            })
        }
    }
}

/// Averages stratum values over covariate strata with the spec's weights.
fn standardize(
    t: &StratumTable,
    prop: Proposition,
    spec: &AnalysisSpec,
    outcome: &OutcomeMean<'_>,
) -> Result<Standardized> {
    let x_star = spec.conditioning_value_x.map(Level::new);
    let (n0, n1) = (t.group_count(0) as f64, t.group_count(1) as f64);
    let mut acc = Standardized::default();
    for c in 0..t.n_strata() {
        let (c0, c1) = (t.stratum_count(0, c) as f64, t.stratum_count(1, c) as f64);
        let w = match spec.options.aggregation {
            Aggregation::Group1 => c1 / n1,
            Aggregation::Group0 => c0 / n0,
            Aggregation::Pooled => (c0 + c1) / (n0 + n1),
        };
        if w == 0.0 {
            continue;
        }
        acc.add_scaled(w, stratum_value(t, prop, c, x_star, outcome)?);
    }
    Ok(acc)
}

fn to_estimate(spec: &AnalysisSpec, s: Standardized) -> DecompositionEstimate {
    let est = match spec.outcome_family {
        OutcomeFamily::Continuous => DecompositionEstimate::new(
            spec.proposition,
            Estimator::Plugin,
            Scale::Additive,
            s.mean1 - s.mean0,
            s.mu - s.mean0,
            s.mean1 - s.mu,
        ),
        OutcomeFamily::RareBinary => DecompositionEstimate::new(
            spec.proposition,
            Estimator::Plugin,
            Scale::Ratio,
            s.mean1 / s.mean0,
            s.mu / s.mean0,
            s.mean1 / s.mu,
        ),
    };
    est.with_warning(Warning::AggregationConvention {
        weights: spec.options.aggregation,
    })
}
