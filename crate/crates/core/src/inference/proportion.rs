use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProportionScale {
    /// (D - D*) / D for differences.
    Additive,
    /// (R - R*) / (R - 1) for ratios.
    Relative,
}

const DEGENERATE: f64 = 1e-12;

/// Share of the initial disparity removed by the intervention. Values above 1
/// (overshoot) or below 0 (widening) are returned as is.
pub fn proportion_reduced(initial: f64, residual: f64, scale: ProportionScale) -> Result<f64> {
    let denom = match scale {
        ProportionScale::Additive => initial,
        ProportionScale::Relative => initial - 1.0,
    };
    if !(denom.abs() > DEGENERATE) {
        return Err(Error::DegenerateInitial(initial));
    }
    Ok((initial - residual) / denom)
}
