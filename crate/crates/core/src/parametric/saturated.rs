use std::collections::{BTreeMap, BTreeSet};

use super::analysis_rows;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::plugin::{Level, Standardized};
use crate::regression::{fit_ols, DesignMatrix};
use crate::spec::{Aggregation, AnalysisSpec, Proposition};

/// OLS on a full set of cell dummies: one free mean per observed cell.
struct SaturatedModel {
    cells: BTreeMap<Vec<Level>, usize>,
    coefs: Vec<f64>,
}

impl SaturatedModel {
    fn fit(keys: &[Vec<Level>], y: &[f64]) -> Result<Self> {
        let distinct: BTreeSet<&Vec<Level>> = keys.iter().collect();
        let cells: BTreeMap<Vec<Level>, usize> = distinct
            .into_iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let n = keys.len();
        let mut x = DesignMatrix::intercept(n);
        // first cell is the baseline absorbed by the intercept
        for (key, &j) in cells.iter().skip(1) {
            let col: Vec<f64> = keys.iter().map(|k| if k == key { 1.0 } else { 0.0 }).collect();
            x = x.with_column(format!("cell{j}"), &col)?;
        }
        let coefs = if n > x.n_cols() {
            fit_ols(&x, y)?.values().to_vec()
        } else {
            // every row its own cell: interpolate exactly
            let mut coefs = vec![0.0; cells.len()];
            for (k, yi) in keys.iter().zip(y) {
                coefs[cells[k]] = *yi;
            }
            let base = coefs[0];
            coefs.iter_mut().skip(1).for_each(|c| *c -= base);
            coefs
        };
        Ok(SaturatedModel { cells, coefs })
    }

    fn predict(&self, key: &[Level]) -> Option<f64> {
        self.cells.get(key).map(|&j| {
            if j == 0 {
                self.coefs[0]
            } else {
                self.coefs[0] + self.coefs[j]
            }
        })
    }
}

/// Saturated linear-probability models for each level of a discrete variable.
struct SaturatedDistribution {
    levels: Vec<Level>,
    models: Vec<SaturatedModel>,
}

impl SaturatedDistribution {
    fn fit(keys: &[Vec<Level>], v: &[Level]) -> Result<Self> {
        let levels: Vec<Level> = v.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let models = levels
            .iter()
            .map(|lv| {
                let ind: Vec<f64> = v.iter().map(|x| if x == lv { 1.0 } else { 0.0 }).collect();
                SaturatedModel::fit(keys, &ind)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SaturatedDistribution { levels, models })
    }

    /// Fitted probabilities at a conditioning cell, for levels seen in it.
    fn at(&self, key: &[Level], seen: &BTreeSet<Vec<Level>>) -> Vec<(Level, f64)> {
        self.levels
            .iter()
            .zip(&self.models)
            .filter_map(|(lv, m)| {
                let mut full = key.to_vec();
                full.push(*lv);
                if !seen.contains(&full) {
                    return None;
                }
                m.predict(key).map(|p| (*lv, p))
            })
            .collect()
    }
}

fn empty(cell: &[Level]) -> Error {
    let parts: Vec<String> = cell.iter().map(|l| l.to_string()).collect();
    Error::EmptyStratum {
        cell: format!("({})", parts.join(", ")),
    }
}

/// Standardization with every conditional mean and probability taken from a
/// saturated regression (all interactions among group, early variable, target
/// and covariates) instead of from cell counts.
///
/// On discrete data this reproduces the plug-in estimator up to least-squares
/// rounding, which makes it an independent check of the stratum arithmetic.
pub fn saturated_standardization(d: &Dataset, spec: &AnalysisSpec) -> Result<Standardized> {
    let b = &spec.bindings;
    let [early] = b.early.as_slice() else {
        return Err(Error::InvalidSpec("saturated models need one early column".into()));
    };
    let rows = analysis_rows(d, spec)?;
    let lv = |name: &str| -> Result<Vec<Level>> {
        Ok(d.values_at(name, &rows)?.into_iter().map(Level::new).collect())
    };
    let (r, x, m) = (lv(&b.group)?, lv(early)?, lv(&b.target)?);
    let y = d.values_at(&b.outcome, &rows)?;
    let cs = b
        .covariates
        .iter()
        .map(|c| lv(c))
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    let c_of = |i: usize| -> Vec<Level> { cs.iter().map(|c| c[i]).collect() };

    // key layouts: [r, c..], [r, c.., x], [r, c.., x, m], [r, c.., m]
    let k_rc: Vec<Vec<Level>> = (0..n).map(|i| [vec![r[i]], c_of(i)].concat()).collect();
    let k_rcx: Vec<Vec<Level>> = (0..n).map(|i| [k_rc[i].clone(), vec![x[i]]].concat()).collect();
    let k_rcxm: Vec<Vec<Level>> = (0..n).map(|i| [k_rcx[i].clone(), vec![m[i]]].concat()).collect();
    let k_rcm: Vec<Vec<Level>> = (0..n).map(|i| [k_rc[i].clone(), vec![m[i]]].concat()).collect();
    let seen_rcx: BTreeSet<Vec<Level>> = k_rcx.iter().cloned().collect();
    let seen_rcxm: BTreeSet<Vec<Level>> = k_rcxm.iter().cloned().collect();
    let seen_rcm: BTreeSet<Vec<Level>> = k_rcm.iter().cloned().collect();

    let y_rc = SaturatedModel::fit(&k_rc, &y)?;
    let y_rcx = SaturatedModel::fit(&k_rcx, &y)?;
    let y_rcxm = SaturatedModel::fit(&k_rcxm, &y)?;
    let x_given_rc = SaturatedDistribution::fit(&k_rc, &x)?;
    let m_given_rcx = SaturatedDistribution::fit(&k_rcx, &m)?;
    let m_given_rc = SaturatedDistribution::fit(&k_rc, &m)?;

    let g0 = Level::new(0.0);
    let g1 = Level::new(1.0);
    let with = |head: Level, c: &[Level], tail: &[Level]| -> Vec<Level> {
        [vec![head], c.to_vec(), tail.to_vec()].concat()
    };
    let pred = |model: &SaturatedModel, key: Vec<Level>| -> Result<f64> {
        model.predict(&key).ok_or_else(|| empty(&key))
    };

    let strata: BTreeSet<Vec<Level>> = (0..n).map(c_of).collect();
    let x_star = spec.conditioning_value_x.map(Level::new);
    let mut out = Standardized::default();
    for c in &strata {
        let count = |g: Level| k_rc.iter().filter(|k| k[0] == g && &k[1..] == c.as_slice()).count() as f64;
        let (c0, c1) = (count(g0), count(g1));
        let (n1, n0) = (
            r.iter().filter(|&&v| v == g1).count() as f64,
            r.iter().filter(|&&v| v == g0).count() as f64,
        );
        let w = match spec.options.aggregation {
            Aggregation::Group1 => c1 / n1,
            Aggregation::Group0 => c0 / n0,
            Aggregation::Pooled => (c0 + c1) / (n0 + n1),
        };
        if w == 0.0 {
            continue;
        }
        let s = match spec.proposition.base() {
            Proposition::P1 => {
                let mut mu = 0.0;
                for (xv, p) in x_given_rc.at(&with(g0, c, &[]), &seen_rcx) {
                    mu += pred(&y_rcx, with(g1, c, &[xv]))? * p;
                }
                Standardized {
                    mu,
                    mean0: pred(&y_rc, with(g0, c, &[]))?,
                    mean1: pred(&y_rc, with(g1, c, &[]))?,
                }
            }
            Proposition::P2 => {
                let at = |xv: Level| -> Result<Standardized> {
                    let mut mu = 0.0;
                    for (mv, p) in m_given_rcx.at(&with(g0, c, &[xv]), &seen_rcxm) {
                        mu += pred(&y_rcxm, with(g1, c, &[xv, mv]))? * p;
                    }
                    Ok(Standardized {
                        mu,
                        mean0: pred(&y_rcx, with(g0, c, &[xv]))?,
                        mean1: pred(&y_rcx, with(g1, c, &[xv]))?,
                    })
                };
                match x_star {
                    Some(xv) => at(xv)?,
                    None => {
                        let mut acc = Standardized::default();
                        for (xv, p) in x_given_rc.at(&with(g1, c, &[]), &seen_rcx) {
                            let s = at(xv)?;
                            acc.mu += p * s.mu;
                            acc.mean0 += p * s.mean0;
                            acc.mean1 += p * s.mean1;
                        }
                        acc
                    }
                }
            }
            Proposition::P3 => {
                let mut mu = 0.0;
                for (xv, px) in x_given_rc.at(&with(g0, c, &[]), &seen_rcx) {
                    for (mv, pm) in m_given_rcx.at(&with(g0, c, &[xv]), &seen_rcxm) {
                        mu += pred(&y_rcxm, with(g1, c, &[xv, mv]))? * pm * px;
                    }
                }
                Standardized {
                    mu,
                    mean0: pred(&y_rc, with(g0, c, &[]))?,
                    mean1: pred(&y_rc, with(g1, c, &[]))?,
                }
            }
            _ => {
                let pm = m_given_rc.at(&with(g0, c, &[]), &seen_rcm);
                let mut mu = 0.0;
                for (xv, px) in x_given_rc.at(&with(g1, c, &[]), &seen_rcx) {
                    for &(mv, p) in &pm {
                        mu += pred(&y_rcxm, with(g1, c, &[xv, mv]))? * p * px;
                    }
                }
                Standardized {
                    mu,
                    mean0: pred(&y_rc, with(g0, c, &[]))?,
                    mean1: pred(&y_rc, with(g1, c, &[]))?,
                }
            }
        };
        out.mu += w * s.mu;
        out.mean0 += w * s.mean0;
        out.mean1 += w * s.mean1;
    }
    Ok(out)
}
