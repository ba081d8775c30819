use super::ols::solve_full_rank;
use super::{CoefficientSet, DesignMatrix, FitSummary};
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;
const COEF_TOL: f64 = 1e-10;
const DEVIANCE_TOL: f64 = 1e-12;
const DIVERGENCE_NORM: f64 = 1e3;

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn deviance(eta: &[f64], y: &[f64]) -> f64 {
    2.0 * eta
        .iter()
        .zip(y)
        .map(|(&e, &yi)| if yi == 1.0 { softplus(-e) } else { softplus(e) })
        .sum::<f64>()
}

/// Maximum-likelihood logistic regression by iteratively reweighted least
/// squares, started at zero slopes and the logit of the outcome mean.
///
/// Each Newton step is halved until the deviance does not increase. The fit
/// stops when the largest coefficient change drops below 1e-10 or the deviance
/// changes by less than 1e-12.
pub fn fit_logistic(x: &DesignMatrix, y: &[f64]) -> Result<CoefficientSet> {
    let (n, p) = (x.n_rows(), x.n_cols());
    if y.len() != n {
        return Err(Error::LengthMismatch {
            column: "response".into(),
            rows: y.len(),
            expected: n,
        });
    }
    if n <= p {
        return Err(Error::TooFewRows { rows: n, cols: p });
    }
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::NonBinaryOutcome("response".into()));
    }
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == n {
        return Err(Error::NonBinaryOutcome("response".into()));
    }
    let ybar = ones as f64 / n as f64;
    let mut beta = vec![0.0; p];
    beta[0] = (ybar / (1.0 - ybar)).ln();
    let mut eta = x.mul_vec(&beta);
    let mut dev = deviance(&eta, y);
    let mut prev_step = 0.0;
    let mut weighted = vec![0.0; n * p];
    let mut rhs = vec![0.0; n];

    for iteration in 1..=MAX_ITERATIONS {
        for i in 0..n {
            let mu = sigmoid(eta[i]);
            let w = (mu * (1.0 - mu)).max(1e-300);
            let sw = w.sqrt();
            rhs[i] = (y[i] - mu) / sw;
            for j in 0..p {
                weighted[j * n + i] = sw * x.column(j)[i];
            }
        }
        let delta = solve_full_rank(x, &weighted, &rhs)?;

        let mut t = 1.0;
        let (cand, cand_eta, cand_dev) = loop {
            let cand: Vec<f64> = beta.iter().zip(&delta).map(|(b, d)| b + t * d).collect();
            let cand_eta = x.mul_vec(&cand);
            let cand_dev = deviance(&cand_eta, y);
            if cand_dev <= dev * (1.0 + 1e-12) || t < 1e-4 {
                break (cand, cand_eta, cand_dev);
            }
            t *= 0.5;
        };
        let step = delta.iter().fold(0.0f64, |m, d| m.max((t * d).abs()));
        let dev_change = (dev - cand_dev).abs();
        beta = cand;
        eta = cand_eta;
        dev = cand_dev;

        let norm = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        if norm > DIVERGENCE_NORM && step >= prev_step {
            return Err(Error::Separation);
        }
        if step < COEF_TOL || dev_change < DEVIANCE_TOL {
            // A vanishing deviance means fitted probabilities have collapsed
            // onto the observed 0/1 values.
            if dev < 1e-6 || norm > DIVERGENCE_NORM {
                return Err(Error::Separation);
            }
            return Ok(CoefficientSet::new(
                x.labels().to_vec(),
                beta,
                FitSummary::Logistic {
                    deviance: dev,
                    iterations: iteration,
                },
                true,
            ));
        }
        prev_step = step;
    }
    let norm = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    if dev < 1e-6 || norm > DIVERGENCE_NORM {
        return Err(Error::Separation);
    }
    Err(Error::NotConverged {
        iterations: MAX_ITERATIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_intercept_only_is_zero() {
        let y = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
        let c = fit_logistic(&DesignMatrix::intercept(6), &y).unwrap();
        assert!(c.intercept().abs() < 1e-12);
        assert!(c.converged);
    }

    #[test]
    fn separated_data_is_detected() {
        let xs: Vec<f64> = (-10..10).map(|i| f64::from(i) + 0.5).collect();
        let y: Vec<f64> = xs.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect();
        let x = DesignMatrix::intercept(xs.len()).with_column("x", &xs).unwrap();
        assert_eq!(fit_logistic(&x, &y).unwrap_err(), Error::Separation);
    }

    #[test]
    fn rejects_constant_outcome() {
        let x = DesignMatrix::intercept(3);
        assert!(matches!(
            fit_logistic(&x, &[1.0, 1.0, 1.0]),
            Err(Error::NonBinaryOutcome(_))
        ));
    }
}
