use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use super::{Column, Dataset, Role};
use crate::error::{Error, Result};

/// Reads a header-first, comma-separated file of numeric columns.
///
/// Empty or unparseable cells become missing. Declared roles are attached and
/// the group column, if declared, is checked to be binary.
pub fn load_csv<P: AsRef<Path>>(path: P, roles: &BTreeMap<Role, Vec<String>>) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    let mut d = read_csv(file)?;
    for (role, names) in roles {
        d = d.with_role(*role, names)?;
    }
    Ok(d)
}

pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyFile);
    }
    let mut cols: Vec<Column> = vec![Vec::new(); headers.len()];
    for record in rdr.records() {
        let record = record?;
        for (j, col) in cols.iter_mut().enumerate() {
            let cell = record.get(j).unwrap_or("");
            col.push(parse_cell(cell));
        }
    }
    Dataset::from_columns(headers.iter().map(str::to_string).zip(cols))
}

fn parse_cell(s: &str) -> Option<f64> {
    if s.is_empty() {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Writes every column; missing cells become empty strings. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let names: Vec<&str> = d.column_names().collect();
    w.write_record(&names)?;
    let cols = names
        .iter()
        .map(|n| d.column(n))
        .collect::<Result<Vec<_>>>()?;
    let mut row = Vec::with_capacity(cols.len());
    for i in 0..d.n_rows() {
        row.clear();
        row.extend(cols.iter().map(|c| c[i].map_or(String::new(), |v| v.to_string())));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roles(pairs: &[(Role, &[&str])]) -> BTreeMap<Role, Vec<String>> {
        pairs
            .iter()
            .map(|(r, c)| (*r, c.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn three_row_file() {
        let f = write_tmp("y,r,x,m\n1.5,0,2,3\n2.5,1,1,0\n-1,1,0.25,4\n");
        let d = load_csv(
            f.path(),
            &roles(&[
                (Role::Outcome, &["y"]),
                (Role::Group, &["r"]),
                (Role::Early, &["x"]),
                (Role::Target, &["m"]),
            ]),
        )
        .unwrap();
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.dense("x").unwrap(), vec![2.0, 1.0, 0.25]);
        assert_eq!(d.role(Role::Target), ["m".to_string()]);
    }

    #[test]
    fn group_value_two_is_rejected() {
        let f = write_tmp("y,r\n1,0\n2,2\n");
        let err = load_csv(f.path(), &roles(&[(Role::Group, &["r"])])).unwrap_err();
        assert!(matches!(err, Error::NonBinaryGroup { row: 1, .. }));
    }

    #[test]
    fn empty_cell_is_missing() {
        let f = write_tmp("y,x\n1,2\n2,\n3,4\n");
        let d = load_csv(f.path(), &BTreeMap::new()).unwrap();
        assert_eq!(d.column("x").unwrap(), &[Some(2.0), None, Some(4.0)]);
    }

    #[test]
    fn empty_file() {
        let f = write_tmp("");
        assert_eq!(load_csv(f.path(), &BTreeMap::new()).unwrap_err(), Error::EmptyFile);
    }

    #[test]
    fn declared_column_must_exist() {
        let f = write_tmp("y,x\n1,2\n");
        let err = load_csv(f.path(), &roles(&[(Role::Target, &["m"])])).unwrap_err();
        assert_eq!(err, Error::MissingColumn("m".into()));
    }

    #[test]
    fn write_then_read_is_exact() {
        let d = Dataset::from_columns(vec![
            ("a", vec![Some(0.1), None, Some(-3.25e-7)]),
            ("b", vec![Some(1.0 / 3.0), Some(2.0), Some(1e300)]),
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, d);
    }
}
