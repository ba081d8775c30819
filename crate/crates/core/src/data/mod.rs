//! Column-oriented analysis tables with declared column roles.

mod csv_io;
mod discretize;
mod missing;
mod pca;

pub use csv_io::{load_csv, read_csv, write_csv};
pub use discretize::quantile_bins;
pub use missing::{add_missing_indicators, standardize, INDICATOR_SUFFIX};
pub use pca::{first_principal_component, PrincipalComponent};

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The part a column plays in a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Outcome,
    Group,
    Covariate,
    Early,
    Target,
    ConfounderL,
    MissingIndicator,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Outcome => "outcome",
            Role::Group => "group",
            Role::Covariate => "covariate",
            Role::Early => "early",
            Role::Target => "target",
            Role::ConfounderL => "confounder_l",
            Role::MissingIndicator => "missing_indicator",
        };
        f.write_str(s)
    }
}

/// One cell-per-row column; `None` marks a missing cell.
pub type Column = Vec<Option<f64>>;

/// An immutable table of numeric columns plus role declarations.
///
/// Every column has exactly `n_rows` cells. When a group column is declared it
/// holds only 0 (reference group) and 1 (disadvantaged group) with no gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: IndexMap<String, Column>,
    n_rows: usize,
    roles: BTreeMap<Role, Vec<String>>,
}

impl Dataset {
    pub fn from_columns<I, S>(columns: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Column)>,
        S: Into<String>,
    {
        let mut map = IndexMap::new();
        let mut n_rows = None;
        for (name, values) in columns {
            let name = name.into();
            let expected = *n_rows.get_or_insert(values.len());
            if values.len() != expected {
                return Err(Error::LengthMismatch {
                    column: name,
                    rows: values.len(),
                    expected,
                });
            }
            if map.contains_key(&name) {
                return Err(Error::DuplicateColumn(name));
            }
            map.insert(name, values);
        }
        Ok(Dataset {
            columns: map,
            n_rows: n_rows.unwrap_or(0),
            roles: BTreeMap::new(),
        })
    }

    /// Builds a dataset from fully observed columns.
    pub fn from_dense<I, S>(columns: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        Self::from_columns(
            columns
                .into_iter()
                .map(|(n, v)| (n, v.into_iter().map(Some).collect::<Column>())),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.contains_key(name)
    }

    pub fn column(&self, name: &str) -> Result<&[Option<f64>]> {
        self.columns
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn roles(&self) -> &BTreeMap<Role, Vec<String>> {
        &self.roles
    }

    pub fn role(&self, role: Role) -> &[String] {
        self.roles.get(&role).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Declares `names` (in order) as the columns playing `role`, replacing any
    /// earlier declaration for that role.
    pub fn with_role<S: AsRef<str>>(mut self, role: Role, names: &[S]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for name in &names {
            if !self.has_column(name) {
                return Err(Error::MissingColumn(name.clone()));
            }
        }
        if role == Role::Group {
            if names.len() != 1 {
                return Err(Error::InvalidSpec(
                    "exactly one group column must be declared".into(),
                ));
            }
            self.validate_group(&names[0])?;
        }
        self.roles.insert(role, names);
        Ok(self)
    }

    fn validate_group(&self, name: &str) -> Result<()> {
        for (row, cell) in self.column(name)?.iter().enumerate() {
            match cell {
                Some(v) if *v == 0.0 || *v == 1.0 => {}
                Some(v) => {
                    return Err(Error::NonBinaryGroup {
                        column: name.to_string(),
                        row,
                        value: v.to_string(),
                    })
                }
                None => {
                    return Err(Error::NonBinaryGroup {
                        column: name.to_string(),
                        row,
                        value: "missing".to_string(),
                    })
                }
            }
        }
        Ok(())
    }

    /// Returns a copy with `name` appended (or replaced in place if it exists).
    pub fn with_column(&self, name: &str, values: Column) -> Result<Self> {
        if values.len() != self.n_rows && !self.columns.is_empty() {
            return Err(Error::LengthMismatch {
                column: name.to_string(),
                rows: values.len(),
                expected: self.n_rows,
            });
        }
        let mut out = self.clone();
        if out.columns.is_empty() {
            out.n_rows = values.len();
        }
        out.columns.insert(name.to_string(), values);
        if let Some(groups) = out.roles.get(&Role::Group) {
            if groups.iter().any(|g| g == name) {
                out.validate_group(name)?;
            }
        }
        Ok(out)
    }

    /// Rows at which every named column is observed, in ascending order.
    pub fn complete_rows<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let cols = names
            .iter()
            .map(|n| self.column(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.n_rows)
            .filter(|&i| cols.iter().all(|c| c[i].is_some()))
            .collect())
    }

    /// Values of `name` at `rows`; fails if any of those cells is missing.
    pub fn values_at(&self, name: &str, rows: &[usize]) -> Result<Vec<f64>> {
        let col = self.column(name)?;
        rows.iter()
            .map(|&i| {
                col[i].ok_or_else(|| Error::MissingValues {
                    column: name.to_string(),
                })
            })
            .collect()
    }

    /// All values of a fully observed column.
    pub fn dense(&self, name: &str) -> Result<Vec<f64>> {
        let col = self.column(name)?;
        col.iter()
            .map(|c| {
                c.ok_or_else(|| Error::MissingValues {
                    column: name.to_string(),
                })
            })
            .collect()
    }

    /// New dataset made of the given rows (repeats allowed), roles preserved.
    pub fn take_rows(&self, rows: &[usize]) -> Self {
        let columns = self
            .columns
            .iter()
            .map(|(k, v)| (k.clone(), rows.iter().map(|&i| v[i]).collect()))
            .collect();
        Dataset {
            columns,
            n_rows: rows.len(),
            roles: self.roles.clone(),
        }
    }

    /// Indices of rows in each group, `(reference, disadvantaged)`.
    pub fn group_rows(&self, group: &str, rows: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
        let col = self.column(group)?;
        let mut g0 = Vec::new();
        let mut g1 = Vec::new();
        for &i in rows {
            match col[i] {
                Some(v) if v == 1.0 => g1.push(i),
                Some(v) if v == 0.0 => g0.push(i),
                other => {
                    return Err(Error::NonBinaryGroup {
                        column: group.to_string(),
                        row: i,
                        value: other.map_or("missing".into(), |v| v.to_string()),
                    })
                }
            }
        }
        Ok((g0, g1))
    }
}
