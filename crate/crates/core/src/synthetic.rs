//! Linear structural model for simulated data with known decomposition
//! values.
//!
//! Group `r` affects the early variable `x`, the target `m` and the outcome
//! `y`; `x` affects `m` and `y`; `m` affects `y`. There are no group
//! interactions, so the population coefficients equal the structural ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Role};
use crate::error::{Error, Result};
use crate::estimate::{DecompositionEstimate, Scale};
use crate::spec::{Estimator, Proposition};

/// How the early variable and target are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorMode {
    /// Linear equations plus normal noise.
    #[default]
    Continuous,
    /// `x` and `m` (and `l`) are 0/1 draws whose success probability is the
    /// linear equation; noise sds for those equations are ignored.
    BinaryXm,
}

/// Time-dependent confounder `l = intercept + group*r + early*x + noise`,
/// entering the target and outcome equations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfounderEquation {
    pub intercept: f64,
    pub group: f64,
    pub early: f64,
    #[serde(default)]
    pub sd: f64,
    pub on_target: f64,
    pub on_outcome: f64,
}

/// A binary covariate independent of the group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateEquation {
    pub prevalence: f64,
    pub on_early: f64,
    pub on_target: f64,
    pub on_outcome: f64,
}

/// Every field falls back to [`StructuralParams::default`] when deserialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StructuralParams {
    /// P(R = 1).
    pub group_prevalence: f64,
    pub x_intercept: f64,
    pub x_group: f64,
    pub x_sd: f64,
    pub m_intercept: f64,
    pub m_group: f64,
    pub m_early: f64,
    pub m_sd: f64,
    pub y_intercept: f64,
    pub y_group: f64,
    pub y_early: f64,
    pub y_target: f64,
    pub y_sd: f64,
    pub confounder: Option<ConfounderEquation>,
    pub covariate: Option<CovariateEquation>,
    /// When set, `y` is Bernoulli with logit link and the intercept replaced by
    /// the value giving this sample prevalence.
    pub binary_outcome_prevalence: Option<f64>,
    pub mode: GeneratorMode,
}

impl Default for StructuralParams {
    fn default() -> Self {
        StructuralParams {
            group_prevalence: 0.5,
            x_intercept: 0.0,
            x_group: 0.0,
            x_sd: 1.0,
            m_intercept: 0.0,
            m_group: 0.0,
            m_early: 0.0,
            m_sd: 1.0,
            y_intercept: 0.0,
            y_group: 0.0,
            y_early: 0.0,
            y_target: 0.0,
            y_sd: 1.0,
            confounder: None,
            covariate: None,
            binary_outcome_prevalence: None,
            mode: GeneratorMode::Continuous,
        }
    }
}

impl StructuralParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if !(self.group_prevalence > 0.0 && self.group_prevalence < 1.0) {
            return bad("group prevalence must lie in (0, 1)");
        }
        let sds = [self.x_sd, self.m_sd, self.y_sd, self.confounder.as_ref().map_or(0.0, |l| l.sd)];
        if sds.iter().any(|s| !(*s >= 0.0)) {
            return bad("noise sds must be nonnegative");
        }
        if let Some(c) = &self.covariate {
            if !(c.prevalence >= 0.0 && c.prevalence <= 1.0) {
                return bad("covariate prevalence must lie in [0, 1]");
            }
        }
        if let Some(p) = self.binary_outcome_prevalence {
            if !(p > 0.0 && p < 1.0) {
                return bad("outcome prevalence must lie in (0, 1)");
            }
        }
        Ok(())
    }

    /// Population disparity: the group coefficient of `y ~ r (+ c)`.
    pub fn total_disparity(&self) -> f64 {
        self.y_group + self.x_group * self.y_early + self.y_target * (self.m_group + self.m_early * self.x_group)
    }
}

fn bernoulli(rng: &mut ChaCha8Rng, p: f64, what: &str) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!(
            "{what} probability {p} is outside [0, 1]"
        )));
    }
    Ok(if rng.random::<f64>() < p { 1.0 } else { 0.0 })
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Intercept `b` with mean(sigmoid(b + lp)) = prevalence, by bisection.
fn calibrate_intercept(lp: &[f64], prevalence: f64) -> f64 {
    let mean_at = |b: f64| lp.iter().map(|v| sigmoid(b + v)).sum::<f64>() / lp.len() as f64;
    let (mut lo, mut hi) = (-60.0, 60.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) < prevalence {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Draws `n` rows. Columns are `r, x, m, y` plus `l` and `c` when those
/// equations are present; roles are declared.
pub fn generate(params: &StructuralParams, n: usize, seed: u64) -> Result<Dataset> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let p = params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };
    let binary = p.mode == GeneratorMode::BinaryXm;
    let (mut r, mut x, mut m, mut y, mut l, mut c) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for _ in 0..n {
        let ri = bernoulli(&mut rng, p.group_prevalence, "group")?;
        let ci = match &p.covariate {
            Some(cv) => bernoulli(&mut rng, cv.prevalence, "covariate")?,
            None => 0.0,
        };
        let cov = p.covariate.as_ref();
        let x_mean = p.x_intercept + p.x_group * ri + cov.map_or(0.0, |cv| cv.on_early * ci);
        let xi = if binary {
            bernoulli(&mut rng, x_mean, "early-variable")?
        } else {
            x_mean + p.x_sd * normal(&mut rng)
        };
        let li = match &p.confounder {
            Some(eq) => {
                let mean = eq.intercept + eq.group * ri + eq.early * xi;
                if binary {
                    bernoulli(&mut rng, mean, "confounder")?
                } else {
                    mean + eq.sd * normal(&mut rng)
                }
            }
            None => 0.0,
        };
        let conf = p.confounder.as_ref();
        let m_mean = p.m_intercept
            + p.m_group * ri
            + p.m_early * xi
            + conf.map_or(0.0, |eq| eq.on_target * li)
            + cov.map_or(0.0, |cv| cv.on_target * ci);
        let mi = if binary {
            bernoulli(&mut rng, m_mean, "target")?
        } else {
            m_mean + p.m_sd * normal(&mut rng)
        };
        let lin = p.y_group * ri
            + p.y_early * xi
            + p.y_target * mi
            + conf.map_or(0.0, |eq| eq.on_outcome * li)
            + cov.map_or(0.0, |cv| cv.on_outcome * ci);
        let yi = if p.binary_outcome_prevalence.is_some() {
            lin
        } else {
            p.y_intercept + lin + p.y_sd * normal(&mut rng)
        };
        r.push(ri);
        x.push(xi);
        m.push(mi);
        y.push(yi);
        l.push(li);
        c.push(ci);
    }
    if let Some(prev) = p.binary_outcome_prevalence {
        let b = calibrate_intercept(&y, prev);
        for yi in y.iter_mut() {
            let pi = sigmoid(b + *yi);
            *yi = if rng.random::<f64>() < pi { 1.0 } else { 0.0 };
        }
    }
    let mut cols = vec![("r", r), ("x", x), ("m", m), ("y", y)];
    if p.confounder.is_some() {
        cols.push(("l", l));
    }
    if p.covariate.is_some() {
        cols.push(("c", c));
    }
    let mut d = Dataset::from_dense(cols)?
        .with_role(Role::Outcome, &["y"])?
        .with_role(Role::Group, &["r"])?
        .with_role(Role::Early, &["x"])?
        .with_role(Role::Target, &["m"])?;
    if p.confounder.is_some() {
        d = d.with_role(Role::ConfounderL, &["l"])?;
    }
    if p.covariate.is_some() {
        d = d.with_role(Role::Covariate, &["c"])?;
    }
    Ok(d)
}

/// Population residual disparity and reduction for P1-P4, from the
/// product-of-coefficients expressions evaluated at the structural values.
pub fn true_values(params: &StructuralParams, proposition: Proposition) -> Result<DecompositionEstimate> {
    params.validate()?;
    if params.binary_outcome_prevalence.is_some() {
        return Err(Error::UnsupportedMode("a binary outcome".into()));
    }
    if params.confounder.is_some() {
        return Err(Error::UnsupportedMode("a time-dependent confounder".into()));
    }
    if proposition.is_time_dependent() {
        return Err(Error::UnsupportedMode(format!("{proposition}")));
    }
    let p = params;
    let direct = p.y_group;
    let via_m = p.m_group * p.y_target;
    let via_x = p.x_group * p.y_early;
    let via_xm = p.x_group * p.m_early * p.y_target;
    let (residual, reduction) = match proposition {
        Proposition::P1 => (direct + via_m, via_x + via_xm),
        Proposition::P2 => (direct, via_m),
        Proposition::P3 => (direct, via_x + via_m + via_xm),
        _ => (direct + via_x, via_m + via_xm),
    };
    Ok(DecompositionEstimate::new(
        proposition,
        Estimator::Product,
        Scale::Additive,
        residual + reduction,
        residual,
        reduction,
    ))
}
