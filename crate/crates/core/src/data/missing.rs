use super::{Dataset, Role};
use crate::error::{Error, Result};

/// Suffix of the 0/1 indicator column created for each filled column.
pub const INDICATOR_SUFFIX: &str = "_miss";

/// For each named column, appends `<name>_miss` (1 = missing, 0 = observed)
/// under the missing-indicator role and replaces missing cells with `fill`.
pub fn add_missing_indicators<S: AsRef<str>>(d: &Dataset, columns: &[S], fill: f64) -> Result<Dataset> {
    let mut out = d.clone();
    let mut indicators: Vec<String> = d.role(Role::MissingIndicator).to_vec();
    for name in columns {
        let name = name.as_ref();
        let col = d
            .column(name)
            .map_err(|_| Error::UnknownColumn(name.to_string()))?;
        let indicator = col
            .iter()
            .map(|c| Some(if c.is_none() { 1.0 } else { 0.0 }))
            .collect();
        let filled = col.iter().map(|c| Some(c.unwrap_or(fill))).collect();
        let ind_name = format!("{name}{INDICATOR_SUFFIX}");
        out = out.with_column(name, filled)?.with_column(&ind_name, indicator)?;
        if !indicators.contains(&ind_name) {
            indicators.push(ind_name);
        }
    }
    out.with_role(Role::MissingIndicator, &indicators)
}

/// Z-scores a column over its observed cells; missing cells stay missing.
pub fn standardize(d: &Dataset, name: &str) -> Result<Dataset> {
    let col = d.column(name)?;
    let obs: Vec<f64> = col.iter().flatten().copied().collect();
    let n = obs.len() as f64;
    if obs.len() < 2 {
        return Err(Error::ZeroVariance(name.to_string()));
    }
    let mean = obs.iter().sum::<f64>() / n;
    let var = obs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var <= 0.0 {
        return Err(Error::ZeroVariance(name.to_string()));
    }
    let sd = var.sqrt();
    let z = col.iter().map(|c| c.map(|v| (v - mean) / sd)).collect();
    d.with_column(name, z)
}
