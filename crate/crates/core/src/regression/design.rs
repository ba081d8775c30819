use crate::data::Dataset;
use crate::error::{Error, Result};

pub const INTERCEPT: &str = "(intercept)";

/// A regressor built from dataset columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Column(String),
    /// Elementwise product, labelled `a:b`.
    Product(String, String),
}

impl Term {
    pub fn col(name: &str) -> Term {
        Term::Column(name.to_string())
    }

    pub fn product(a: &str, b: &str) -> Term {
        Term::Product(a.to_string(), b.to_string())
    }

    pub fn label(&self) -> String {
        match self {
            Term::Column(c) => c.clone(),
            Term::Product(a, b) => format!("{a}:{b}"),
        }
    }
}

/// Dense column-major design with an intercept in column 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n_rows: usize,
    labels: Vec<String>,
    data: Vec<f64>,
}

impl DesignMatrix {
    /// Intercept-only design.
    pub fn intercept(n_rows: usize) -> Self {
        DesignMatrix {
            n_rows,
            labels: vec![INTERCEPT.to_string()],
            data: vec![1.0; n_rows],
        }
    }

    pub fn with_column(mut self, label: impl Into<String>, values: &[f64]) -> Result<Self> {
        let label = label.into();
        if values.len() != self.n_rows {
            return Err(Error::LengthMismatch {
                column: label,
                rows: values.len(),
                expected: self.n_rows,
            });
        }
        if self.labels.contains(&label) {
            return Err(Error::DuplicateColumn(label));
        }
        self.labels.push(label);
        self.data.extend_from_slice(values);
        Ok(self)
    }

    /// Builds `[1, terms...]` over the given rows of `d`. Every referenced
    /// cell must be observed on those rows.
    pub fn from_dataset(d: &Dataset, rows: &[usize], terms: &[Term]) -> Result<Self> {
        let mut x = DesignMatrix::intercept(rows.len());
        for term in terms {
            let values = match term {
                Term::Column(c) => d.values_at(c, rows)?,
                Term::Product(a, b) => {
                    let va = d.values_at(a, rows)?;
                    let vb = d.values_at(b, rows)?;
                    va.iter().zip(&vb).map(|(p, q)| p * q).collect()
                }
            };
            x = x.with_column(term.label(), &values)?;
        }
        Ok(x)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    /// Column-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `X b` for coefficients in column order.
    pub fn mul_vec(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n_cols());
        let mut out = vec![0.0; self.n_rows];
        for (j, bj) in b.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(self.column(j)) {
                *o += bj * x;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_products_and_rejects_duplicates() {
        let d = Dataset::from_dense(vec![("r", vec![0.0, 1.0, 1.0]), ("x", vec![2.0, 3.0, 4.0])])
            .unwrap();
        let x = DesignMatrix::from_dataset(
            &d,
            &[0, 1, 2],
            &[Term::col("r"), Term::col("x"), Term::product("r", "x")],
        )
        .unwrap();
        assert_eq!(x.labels(), ["(intercept)", "r", "x", "r:x"]);
        assert_eq!(x.column(0), [1.0, 1.0, 1.0]);
        assert_eq!(x.column(3), [0.0, 3.0, 4.0]);
        let dup = DesignMatrix::from_dataset(&d, &[0, 1], &[Term::col("x"), Term::col("x")]);
        assert_eq!(dup.unwrap_err(), Error::DuplicateColumn("x".into()));
    }
}
