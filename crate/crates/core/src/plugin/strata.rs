use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Bound;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// A category code usable as an ordered map key.
#[derive(Debug, Clone, Copy)]
pub struct Level(f64);

impl Level {
    pub fn new(v: f64) -> Level {
        // -0.0 and 0.0 are the same category
        Level(if v == 0.0 { 0.0 } else { v })
    }

    pub fn value(self) -> f64 {
        self.0
    }

    const MIN: Level = Level(f64::NEG_INFINITY);
    const MAX: Level = Level(f64::INFINITY);
}

impl PartialEq for Level {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0).is_eq()
    }
}

impl Eq for Level {}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Count and outcome total of one cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub sum: f64,
}

impl Cell {
    fn add(&mut self, y: f64) {
        self.n += 1;
        self.sum += y;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }
}

type Rc = (u8, usize);
type Rcv = (u8, usize, Level);
type Rcvv = (u8, usize, Level, Level);
type Rcxml = (u8, usize, Level, Level, Level);

/// Cell counts and outcome totals by group, covariate stratum and the levels
/// of the early variable, target and (optionally) time-dependent confounder.
///
/// Covariate strata are the distinct observed tuples of the covariate
/// columns, numbered in sorted order.
#[derive(Debug, Clone)]
pub struct StratumTable {
    covariates: Vec<String>,
    c_levels: Vec<Vec<Level>>,
    group_n: [usize; 2],
    rc: BTreeMap<Rc, Cell>,
    rcx: BTreeMap<Rcv, Cell>,
    rcm: BTreeMap<Rcv, Cell>,
    rcxm: BTreeMap<Rcvv, Cell>,
    rcxl: BTreeMap<Rcvv, Cell>,
    rcxml: BTreeMap<Rcxml, Cell>,
}

/// Column names the table is built from.
#[derive(Debug, Clone, Copy)]
pub struct StrataColumns<'a> {
    pub outcome: &'a str,
    pub group: &'a str,
    pub early: &'a str,
    pub target: &'a str,
    pub covariates: &'a [String],
    pub confounder: Option<&'a str>,
}

fn check_levels(name: &str, values: &[f64], limit: usize) -> Result<()> {
    let distinct: BTreeSet<Level> = values.iter().map(|&v| Level::new(v)).collect();
    if distinct.len() > limit {
        return Err(Error::TooManyLevels {
            column: name.to_string(),
            levels: distinct.len(),
            limit,
        });
    }
    Ok(())
}

impl StratumTable {
    /// Tabulates `rows` of `d`. Rows are accumulated in the given order, so
    /// tables built from the same rows are bitwise identical.
    pub fn build(d: &Dataset, rows: &[usize], cols: StrataColumns<'_>, max_levels: usize) -> Result<Self> {
        let y = d.values_at(cols.outcome, rows)?;
        let r = d.values_at(cols.group, rows)?;
        let x = d.values_at(cols.early, rows)?;
        let m = d.values_at(cols.target, rows)?;
        check_levels(cols.early, &x, max_levels)?;
        check_levels(cols.target, &m, max_levels)?;
        let l = match cols.confounder {
            Some(name) => {
                let v = d.values_at(name, rows)?;
                check_levels(name, &v, max_levels)?;
                v
            }
            None => vec![0.0; rows.len()],
        };
        let mut c_cols = Vec::with_capacity(cols.covariates.len());
        for name in cols.covariates {
            let v = d.values_at(name, rows)?;
            check_levels(name, &v, max_levels)?;
            c_cols.push(v);
        }
        let c_key = |i: usize| -> Vec<Level> { c_cols.iter().map(|c| Level::new(c[i])).collect() };
        let tuples: BTreeSet<Vec<Level>> = (0..rows.len()).map(c_key).collect();
        let c_levels: Vec<Vec<Level>> = tuples.into_iter().collect();
        let c_index: BTreeMap<&[Level], usize> = c_levels
            .iter()
            .enumerate()
            .map(|(i, k)| (k.as_slice(), i))
            .collect();

        let mut t = StratumTable {
            covariates: cols.covariates.to_vec(),
            c_levels: c_levels.clone(),
            group_n: [0, 0],
            rc: BTreeMap::new(),
            rcx: BTreeMap::new(),
            rcm: BTreeMap::new(),
            rcxm: BTreeMap::new(),
            rcxl: BTreeMap::new(),
            rcxml: BTreeMap::new(),
        };
        for i in 0..rows.len() {
            let g = if r[i] == 1.0 { 1u8 } else { 0u8 };
            let c = c_index[c_key(i).as_slice()];
            let (xv, mv, lv) = (Level::new(x[i]), Level::new(m[i]), Level::new(l[i]));
            let yi = y[i];
            t.group_n[g as usize] += 1;
            t.rc.entry((g, c)).or_default().add(yi);
            t.rcx.entry((g, c, xv)).or_default().add(yi);
            t.rcm.entry((g, c, mv)).or_default().add(yi);
            t.rcxm.entry((g, c, xv, mv)).or_default().add(yi);
            t.rcxl.entry((g, c, xv, lv)).or_default().add(yi);
            t.rcxml.entry((g, c, xv, mv, lv)).or_default().add(yi);
        }
        Ok(t)
    }

    pub fn n_strata(&self) -> usize {
        self.c_levels.len()
    }

    pub fn group_count(&self, r: u8) -> usize {
        self.group_n[r as usize]
    }

    pub fn stratum_count(&self, r: u8, c: usize) -> usize {
        self.rc.get(&(r, c)).map_or(0, |cell| cell.n)
    }

    pub(crate) fn describe(&self, r: u8, c: usize, parts: &[(&str, Level)]) -> String {
        let mut s = format!("(r={r}");
        for (name, v) in parts {
            s.push_str(&format!(", {name}={v}"));
        }
        for (name, v) in self.covariates.iter().zip(&self.c_levels[c]) {
            s.push_str(&format!(", {name}={v}"));
        }
        s.push(')');
        s
    }

    fn empty(&self, r: u8, c: usize, parts: &[(&str, Level)]) -> Error {
        Error::EmptyStratum {
            cell: self.describe(r, c, parts),
        }
    }

    /// E[Y | r, c].
    pub fn mean_rc(&self, r: u8, c: usize) -> Result<f64> {
        self.rc
            .get(&(r, c))
            .map(Cell::mean)
            .ok_or_else(|| self.empty(r, c, &[]))
    }

    /// E[Y | r, x, c].
    pub fn mean_rcx(&self, r: u8, c: usize, x: Level) -> Result<f64> {
        self.rcx
            .get(&(r, c, x))
            .map(Cell::mean)
            .ok_or_else(|| self.empty(r, c, &[("x", x)]))
    }

    /// E[Y | r, x, m, c].
    pub fn mean_rcxm(&self, r: u8, c: usize, x: Level, m: Level) -> Result<f64> {
        self.rcxm
            .get(&(r, c, x, m))
            .map(Cell::mean)
            .ok_or_else(|| self.empty(r, c, &[("x", x), ("m", m)]))
    }

    /// E[Y | r, x, m, c, l].
    pub fn mean_rcxml(&self, r: u8, c: usize, x: Level, m: Level, l: Level) -> Result<f64> {
        self.rcxml
            .get(&(r, c, x, m, l))
            .map(Cell::mean)
            .ok_or_else(|| self.empty(r, c, &[("x", x), ("m", m), ("l", l)]))
    }

    /// `(x, P(x | r, c))` over levels observed in the cell.
    pub fn dist_x(&self, r: u8, c: usize) -> Vec<(Level, f64)> {
        let total = self.stratum_count(r, c) as f64;
        self.rcx
            .range((r, c, Level::MIN)..=(r, c, Level::MAX))
            .map(|(k, cell)| (k.2, cell.n as f64 / total))
            .collect()
    }

    /// `(m, P(m | r, c))`.
    pub fn dist_m(&self, r: u8, c: usize) -> Vec<(Level, f64)> {
        let total = self.stratum_count(r, c) as f64;
        self.rcm
            .range((r, c, Level::MIN)..=(r, c, Level::MAX))
            .map(|(k, cell)| (k.2, cell.n as f64 / total))
            .collect()
    }

    fn count_rcx(&self, r: u8, c: usize, x: Level) -> usize {
        self.rcx.get(&(r, c, x)).map_or(0, |cell| cell.n)
    }

    fn conditional(
        &self,
        map: &BTreeMap<Rcvv, Cell>,
        r: u8,
        c: usize,
        x: Level,
    ) -> Vec<(Level, f64)> {
        let total = self.count_rcx(r, c, x) as f64;
        map.range((
            Bound::Included((r, c, x, Level::MIN)),
            Bound::Included((r, c, x, Level::MAX)),
        ))
        .map(|(k, cell)| (k.3, cell.n as f64 / total))
        .collect()
    }

    /// `(m, P(m | r, x, c))`.
    pub fn dist_m_given_x(&self, r: u8, c: usize, x: Level) -> Vec<(Level, f64)> {
        self.conditional(&self.rcxm, r, c, x)
    }

    /// `(l, P(l | r, x, c))`.
    pub fn dist_l_given_x(&self, r: u8, c: usize, x: Level) -> Vec<(Level, f64)> {
        self.conditional(&self.rcxl, r, c, x)
    }
}
