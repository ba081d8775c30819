use super::qr::PivotedQr;
use super::{CoefficientSet, DesignMatrix, FitSummary};
use crate::error::{Error, Result};

/// Ordinary least squares of `y` on the design.
pub fn fit_ols(x: &DesignMatrix, y: &[f64]) -> Result<CoefficientSet> {
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
    let beta = solve_full_rank(x, x.as_slice(), y)?;
    let fitted = x.mul_vec(&beta);
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(CoefficientSet::new(
        x.labels().to_vec(),
        beta,
        FitSummary::Ols {
            residual_variance: rss / (n - p) as f64,
            n,
        },
        true,
    ))
}

/// Least squares on `data` (the design, possibly row-weighted), reporting
/// dependent columns by the design's labels.
pub(super) fn solve_full_rank(x: &DesignMatrix, data: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let qr = PivotedQr::new(data, x.n_rows(), x.n_cols());
    if !qr.is_full_rank() {
        return Err(Error::RankDeficient {
            columns: qr
                .dependent_columns()
                .into_iter()
                .map(|j| x.labels()[j].clone())
                .collect(),
        });
    }
    Ok(qr.solve(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_response_gives_mean() {
        let x = DesignMatrix::intercept(4);
        let c = fit_ols(&x, &[5.0; 4]).unwrap();
        assert!((c.intercept() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let x = DesignMatrix::intercept(4).with_column("x", &xs).unwrap();
        let y: Vec<f64> = xs.iter().map(|v| 2.0 * v).collect();
        let c = fit_ols(&x, &y).unwrap();
        assert!(c.intercept().abs() < 1e-13);
        assert!((c.coef("x").unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn collinear_columns_are_named() {
        let a = [1.0, 2.0, 3.0, 5.0, 8.0];
        let b: Vec<f64> = a.iter().map(|v| 3.0 * v - 1.0).collect();
        let x = DesignMatrix::intercept(5)
            .with_column("a", &a)
            .unwrap()
            .with_column("b", &b)
            .unwrap();
        match fit_ols(&x, &[1.0, 0.0, 2.0, 1.0, 3.0]).unwrap_err() {
            Error::RankDeficient { columns } => assert_eq!(columns.len(), 1),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn needs_more_rows_than_columns() {
        let x = DesignMatrix::intercept(2).with_column("a", &[1.0, 2.0]).unwrap();
        assert_eq!(
            fit_ols(&x, &[1.0, 2.0]).unwrap_err(),
            Error::TooFewRows { rows: 2, cols: 2 }
        );
    }
}
