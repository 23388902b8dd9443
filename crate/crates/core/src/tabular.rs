//! Numeric CSV tables: header detection, named columns, `#` comments.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("CSV syntax: {0}")]
    Csv(#[from] csv::Error),
    #[error("table has no data rows")]
    Empty,
    #[error("row {row} has {got} fields, expected {expected}")]
    Ragged { row: usize, expected: usize, got: usize },
    #[error("row {row}, column {column:?}: {value:?} is not a finite number")]
    NotNumeric { row: usize, column: String, value: String },
    #[error("no column named {0:?}")]
    MissingColumn(String),
    #[error("table has {0} columns; name one with FILE:COLUMN")]
    AmbiguousColumn(usize),
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Column-major numeric table. Headers default to `c0, c1, ...` when the
/// first record is itself numeric.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable {
    headers: Vec<String>,
    columns: Vec<Vec<f64>>,
}

fn parse_cell(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

impl NumericTable {
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = reader.records();
        let first = loop {
            match records.next() {
                None => return Err(TableError::Empty),
                Some(r) => {
                    let r = r?;
                    if !(r.len() == 1 && r[0].is_empty()) {
                        break r;
                    }
                }
            }
        };
        let width = first.len();
        let first_numeric = first.iter().all(|f| parse_cell(f).is_some());
        let headers: Vec<String> = if first_numeric {
            (0..width).map(|i| format!("c{i}")).collect()
        } else {
            first.iter().map(str::to_string).collect()
        };
        for (i, h) in headers.iter().enumerate() {
            if headers[..i].contains(h) {
                return Err(TableError::DuplicateColumn(h.clone()));
            }
        }
        let mut columns = vec![Vec::new(); width];
        let mut push = |row: usize, rec: &csv::StringRecord| -> Result<(), TableError> {
            if rec.len() != width {
                return Err(TableError::Ragged {
                    row,
                    expected: width,
                    got: rec.len(),
                });
            }
            for (j, field) in rec.iter().enumerate() {
                let v = parse_cell(field).ok_or_else(|| TableError::NotNumeric {
                    row,
                    column: headers[j].clone(),
                    value: field.to_string(),
                })?;
                columns[j].push(v);
            }
            Ok(())
        };
        if first_numeric {
            push(1, &first)?;
        }
        for (i, rec) in records.enumerate() {
            let rec = rec?;
            if rec.len() == 1 && rec[0].is_empty() {
                continue;
            }
            push(i + 2, &rec)?;
        }
        if columns[0].is_empty() {
            return Err(TableError::Empty);
        }
        Ok(Self { headers, columns })
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        let text = std::fs::read_to_string(path).map_err(|source| TableError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn column(&self, name: &str) -> Result<&[f64], TableError> {
        self.headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| TableError::MissingColumn(name.to_string()))
    }

    /// The named column, or the only column when `name` is `None`.
    pub fn select(&self, name: Option<&str>) -> Result<&[f64], TableError> {
        match name {
            Some(n) => self.column(n),
            None if self.columns.len() == 1 => Ok(&self.columns[0]),
            None => Err(TableError::AmbiguousColumn(self.columns.len())),
        }
    }
}

/// Splits `path.csv:column` into its parts. A suffix containing a path
/// separator is treated as part of the path.
pub fn split_column_ref(spec: &str) -> (&str, Option<&str>) {
    match spec.rsplit_once(':') {
        Some((p, c)) if !p.is_empty() && !c.is_empty() && !c.contains(['/', '\\']) => (p, Some(c)),
        _ => (spec, None),
    }
}

/// Reads one numeric column given a `path[:column]` reference.
pub fn read_column(spec: &str) -> Result<Vec<f64>, TableError> {
    let (path, col) = split_column_ref(spec);
    let table = NumericTable::load(Path::new(path))?;
    table.select(col).map(<[f64]>::to_vec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_comments() {
        let t = NumericTable::parse("# fixture\nnv, pre ,post\n0.001,0.1,0.05\n\n0.002,0.2,0.07\n").unwrap();
        assert_eq!(t.headers(), ["nv", "pre", "post"]);
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.column("POST").unwrap(), [0.05, 0.07]);
    }

    #[test]
    fn headerless_single_column() {
        let t = NumericTable::parse("1.5\n2.5\n-3e-4\n").unwrap();
        assert_eq!(t.select(None).unwrap(), [1.5, 2.5, -3e-4]);
        assert_eq!(t.headers(), ["c0"]);
    }

    #[test]
    fn errors() {
        assert!(matches!(NumericTable::parse(""), Err(TableError::Empty)));
        assert!(matches!(NumericTable::parse("a,b\n"), Err(TableError::Empty)));
        assert!(matches!(
            NumericTable::parse("a,b\n1,2\n3\n"),
            Err(TableError::Ragged { row: 3, .. })
        ));
        assert!(matches!(
            NumericTable::parse("a\n1\nnan\n"),
            Err(TableError::NotNumeric { row: 3, .. })
        ));
        assert!(matches!(
            NumericTable::parse("a,a\n1,2\n"),
            Err(TableError::DuplicateColumn(_))
        ));
        let t = NumericTable::parse("a,b\n1,2\n").unwrap();
        assert!(matches!(t.select(None), Err(TableError::AmbiguousColumn(2))));
        assert!(matches!(t.column("z"), Err(TableError::MissingColumn(_))));
    }

    #[test]
    fn column_refs() {
        assert_eq!(split_column_ref("t9.csv:post"), ("t9.csv", Some("post")));
        assert_eq!(split_column_ref("t9.csv"), ("t9.csv", None));
        assert_eq!(split_column_ref("C:\\data\\x.csv"), ("C:\\data\\x.csv", None));
        assert_eq!(split_column_ref("x.csv:"), ("x.csv:", None));
    }
}
