use std::collections::HashSet;
use std::path::Path;

use csv::{ReaderBuilder, Trim};

use crate::error::{Error, Result};
use crate::point::{validate_distinct, Point};

/// Which columns to read and how.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CsvSpec {
    pub x_column: String,
    pub y_column: String,
    /// Negate x so that smaller values are preferred.
    pub negate_x: bool,
    pub negate_y: bool,
    /// Drop repeated locations, keeping the first row.
    pub dedupe: bool,
}

impl CsvSpec {
    pub fn new(x_column: impl Into<String>, y_column: impl Into<String>) -> Self {
        CsvSpec { x_column: x_column.into(), y_column: y_column.into(), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ingested {
    pub points: Vec<Point>,
    /// Rows without two finite numbers in the selected columns.
    pub skipped: usize,
    /// Rows dropped as repeated locations.
    pub duplicates: usize,
}

/// Reads a headed, comma-separated file. Parsed rows get ids `0, 1, …` in
/// file order.
pub fn ingest_csv(path: impl AsRef<Path>, spec: &CsvSpec) -> Result<Ingested> {
    let path = path.as_ref();
    let ingest_err = |message: String| Error::Ingest { path: path.to_path_buf(), message };
    let mut reader = ReaderBuilder::new().trim(Trim::All).flexible(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| ingest_err(format!("no column named {name:?}")))
    };
    let (xi, yi) = (column(&spec.x_column)?, column(&spec.y_column)?);

    let mut points = Vec::new();
    let mut seen = HashSet::new();
    let (mut skipped, mut duplicates, mut next_id) = (0, 0, 0);
    for record in reader.records() {
        let parsed = record.ok().and_then(|r| {
            let x = r.get(xi)?.parse::<f64>().ok()?;
            let y = r.get(yi)?.parse::<f64>().ok()?;
            (x.is_finite() && y.is_finite()).then_some((x, y))
        });
        let Some((x, y)) = parsed else {
            skipped += 1;
            continue;
        };
        let x = if spec.negate_x { -x } else { x };
        let y = if spec.negate_y { -y } else { y };
        let id = next_id;
        next_id += 1;
        // -0.0 and 0.0 are the same location.
        let key = ((x + 0.0).to_bits(), (y + 0.0).to_bits());
        if spec.dedupe && !seen.insert(key) {
            duplicates += 1;
            continue;
        }
        points.push(Point::new(id, x, y));
    }
    if points.is_empty() {
        return Err(ingest_err(format!("no usable rows ({skipped} skipped)")));
    }
    validate_distinct(&points)?;
    Ok(Ingested { points, skipped, duplicates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn dedupe_keeps_first_row() {
        let f = file("a,b\n1,2\n3,4\n1,2\n");
        let mut spec = CsvSpec::new("a", "b");
        spec.dedupe = true;
        let got = ingest_csv(f.path(), &spec).unwrap();
        assert_eq!(got.points, vec![Point::new(0, 1.0, 2.0), Point::new(1, 3.0, 4.0)]);
        assert_eq!(got.duplicates, 1);
        spec.dedupe = false;
        assert!(matches!(ingest_csv(f.path(), &spec), Err(Error::DuplicatePoint { .. })));
    }

    #[test]
    fn skips_bad_rows() {
        let f = file("id, x ,y\n0, 1.5, 2\n1, ?, 3\n2, 4\n3, 5, inf\n4, -1, -2\n");
        let got = ingest_csv(f.path(), &CsvSpec::new("x", "y")).unwrap();
        assert_eq!(got.points.len(), 2);
        assert_eq!(got.skipped, 3);
        assert_eq!(got.points[1], Point::new(1, -1.0, -2.0));
    }

    #[test]
    fn negation() {
        let f = file("x,y\n1,5\n2,4\n");
        let mut spec = CsvSpec::new("x", "y");
        spec.negate_x = true;
        let got = ingest_csv(f.path(), &spec).unwrap();
        assert_eq!(got.points[0].x, -1.0);
        assert_eq!(crate::point::skyline(&got.points).unwrap().ids(), vec![0]);
    }

    #[test]
    fn errors() {
        let f = file("x,y\n?,?\n");
        assert!(matches!(ingest_csv(f.path(), &CsvSpec::new("x", "y")), Err(Error::Ingest { .. })));
        assert!(matches!(ingest_csv(f.path(), &CsvSpec::new("x", "z")), Err(Error::Ingest { .. })));
        assert!(ingest_csv("/nonexistent/file.csv", &CsvSpec::new("x", "y")).is_err());
    }
}
