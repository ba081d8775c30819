use nalgebra::{DMatrix, SymmetricEigen};

use super::Dataset;
use crate::error::{Error, Result};

/// Leading principal component of a set of standardized columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalComponent {
    /// Per-row scores, sample mean zero.
    pub scores: Vec<f64>,
    /// Unit-norm loadings in column order; the first is nonnegative.
    pub loadings: Vec<f64>,
    /// Largest eigenvalue of the correlation matrix.
    pub eigenvalue: f64,
}

/// Scores on the leading eigenvector of the correlation matrix of `columns`.
///
/// Columns are standardized to mean 0 and unit sample variance first, so
/// measures in very different units contribute on equal footing.
pub fn first_principal_component<S: AsRef<str>>(d: &Dataset, columns: &[S]) -> Result<PrincipalComponent> {
    if columns.len() < 2 {
        return Err(Error::TooFewColumns);
    }
    let n = d.n_rows();
    let k = columns.len();
    let mut z = DMatrix::<f64>::zeros(n, k);
    for (j, name) in columns.iter().enumerate() {
        let name = name.as_ref();
        let v = d.dense(name)?;
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        if !(var > 0.0) {
            return Err(Error::ZeroVariance(name.to_string()));
        }
        let sd = var.sqrt();
        for (i, x) in v.iter().enumerate() {
            z[(i, j)] = (x - mean) / sd;
        }
    }
    let corr = z.tr_mul(&z) / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(corr);
    let (top, eigenvalue) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let mut loadings: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    if loadings[0] < 0.0 {
        loadings.iter_mut().for_each(|l| *l = -*l);
    }
    let scores = (0..n)
        .map(|i| (0..k).map(|j| z[(i, j)] * loadings[j]).sum())
        .collect();
    Ok(PrincipalComponent {
        scores,
        loadings,
        eigenvalue,
    })
}
