use super::{Column, Dataset};
use crate::error::{Error, Result};

/// Replaces a continuous column by quantile-bin codes `0..bins`.
///
/// Cut points are the empirical `k/bins` quantiles of the observed cells (lower
/// empirical quantile); a value equal to a cut point falls in the lower bin.
/// Ties can merge bins, so fewer than `bins` codes may appear. Missing cells
/// stay missing.
pub fn quantile_bins(d: &Dataset, name: &str, bins: usize) -> Result<Dataset> {
    if bins < 2 {
        return Err(Error::InvalidSpec(format!(
            "quantile binning of `{name}` needs at least 2 bins"
        )));
    }
    let col = d.column(name)?;
    let mut obs: Vec<f64> = col.iter().flatten().copied().collect();
    if obs.is_empty() {
        return Err(Error::MissingValues {
            column: name.to_string(),
        });
    }
    obs.sort_by(f64::total_cmp);
    let n = obs.len();
    let cuts: Vec<f64> = (1..bins)
        .map(|k| obs[((k * n).div_ceil(bins)).saturating_sub(1).min(n - 1)])
        .collect();
    let coded: Column = col
        .iter()
        .map(|c| c.map(|v| cuts.partition_point(|&cut| cut < v) as f64))
        .collect();
    d.with_column(name, coded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_even_bins() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        let d = Dataset::from_dense(vec![("x", v)]).unwrap();
        let out = quantile_bins(&d, "x", 5).unwrap();
        assert_eq!(
            out.dense("x").unwrap(),
            vec![0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0]
        );
    }

    #[test]
    fn missing_preserved() {
        let d = Dataset::from_columns(vec![("x", vec![Some(1.0), None, Some(2.0)])]).unwrap();
        let out = quantile_bins(&d, "x", 2).unwrap();
        assert_eq!(out.column("x").unwrap(), &[Some(0.0), None, Some(1.0)]);
    }
}
