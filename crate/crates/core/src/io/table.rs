use std::fs::File;
use std::path::Path;

use crate::dataset::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::write_atomically;

/// Which column, if any, carries the 0/1 ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// Header name; requires `has_header`.
    Name(String),
    /// 0-based column position.
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub has_header: bool,
    pub label_column: Option<LabelColumn>,
    pub delimiter: u8,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            has_header: true,
            label_column: None,
            delimiter: b',',
        }
    }
}

impl CsvSchema {
    pub fn with_label(mut self, column: LabelColumn) -> Self {
        self.label_column = Some(column);
        self
    }
}

fn parse_err(path: &Path, line: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn parse_label(cell: &str) -> Option<bool> {
    match cell.trim().parse::<f64>() {
        Ok(0.0) => Some(false),
        Ok(1.0) => Some(true),
        _ => None,
    }
}

/// Loads a row-per-object CSV. Every cell outside the label column must be
/// a finite number. Errors carry the file line and the 1-based column.
pub fn load_csv<S: Scalar>(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset<S>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(schema.has_header)
        .delimiter(schema.delimiter)
        .flexible(true)
        .from_reader(file);

    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        parse_err(path, line, 0, e.to_string())
    };

    let header: Option<Vec<String>> = if schema.has_header {
        Some(
            reader
                .headers()
                .map_err(csv_err)?
                .iter()
                .map(|h| h.trim().to_string())
                .collect(),
        )
    } else {
        None
    };

    let label_idx = match (&schema.label_column, &header) {
        (None, _) => None,
        (Some(LabelColumn::Index(i)), _) => Some(*i),
        (Some(LabelColumn::Name(name)), Some(h)) => Some(
            h.iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::format(path, format!("no column named {name:?} in header")))?,
        ),
        (Some(LabelColumn::Name(name)), None) => {
            return Err(Error::format(
                path,
                format!("label column {name:?} given by name but the file has no header"),
            ))
        }
    };

    let mut width = header.as_ref().map(Vec::len);
    let mut values: Vec<S> = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(parse_err(
                path,
                line,
                record.len().min(w) + 1,
                format!("expected {w} fields, found {}", record.len()),
            ));
        }
        if let Some(l) = label_idx {
            if l >= w {
                return Err(Error::format(
                    path,
                    format!("label column {l} out of range for {w} columns"),
                ));
            }
        }
        for (c, cell) in record.iter().enumerate() {
            if Some(c) == label_idx {
                let label = parse_label(cell)
                    .ok_or_else(|| parse_err(path, line, c + 1, format!("label {cell:?} is not 0 or 1")))?;
                labels.push(label);
                continue;
            }
            let v: S = cell
                .trim()
                .parse()
                .map_err(|_| parse_err(path, line, c + 1, format!("{cell:?} is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(path, line, c + 1, format!("{cell:?} is not finite")));
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::format(path, "no data rows"));
    }
    let dim = width.unwrap_or(0) - usize::from(label_idx.is_some());
    if dim == 0 {
        return Err(Error::format(path, "no feature columns"));
    }

    let mut dataset = Dataset::new(FeatureMatrix::from_column_major(dim, rows, values)?)?;
    if let Some(h) = header {
        let names = h
            .into_iter()
            .enumerate()
            .filter(|(c, _)| Some(*c) != label_idx)
            .map(|(_, n)| n)
            .collect();
        dataset = dataset.with_feature_names(names)?;
    }
    if label_idx.is_some() {
        dataset = dataset.with_labels(labels)?;
    }
    Ok(dataset)
}

/// Writes one row per object with a header; labels, when present, go to a
/// trailing `label` column. Values use the shortest round-trip form.
pub fn write_csv<S: Scalar>(dataset: &Dataset<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_atomically(path, |out| {
        let names: Vec<String> = match dataset.feature_names() {
            Some(n) => n.to_vec(),
            None => (0..dataset.dim()).map(|d| format!("f{d}")).collect(),
        };
        let mut header = names.join(",");
        if dataset.labels().is_some() {
            header.push_str(",label");
        }
        writeln!(out, "{header}")?;
        for (i, column) in dataset.values().columns().enumerate() {
            let row: Vec<String> = column.iter().map(|v| v.to_string()).collect();
            write!(out, "{}", row.join(","))?;
            if let Some(labels) = dataset.labels() {
                write!(out, ",{}", u8::from(labels[i]))?;
            }
            writeln!(out)?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn file(content: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        fs::write(f.path(), content).unwrap();
        f
    }

    #[test]
    fn labelled_three_rows() {
        let f = file("a,b,y\n1,2,0\n3,4,0\n5,6,1\n");
        let schema = CsvSchema::default().with_label(LabelColumn::Name("y".into()));
        let ds: Dataset<f64> = load_csv(f.path(), &schema).unwrap();
        assert_eq!((ds.len(), ds.dim()), (3, 2));
        assert_eq!(ds.labels().unwrap(), &[false, false, true]);
        assert_eq!(ds.values().column(2), &[5.0, 6.0]);
        assert_eq!(ds.feature_names().unwrap(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn nan_cell_is_located() {
        let f = file("a,b\n1,2\n3,NaN\n");
        let err = load_csv::<f64>(f.path(), &CsvSchema::default()).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 2)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn non_numeric_and_ragged_rows() {
        let f = file("1;x\n2;3\n");
        let schema = CsvSchema {
            has_header: false,
            delimiter: b';',
            ..CsvSchema::default()
        };
        let err = load_csv::<f64>(f.path(), &schema).unwrap_err().to_string();
        assert!(err.contains("line 1, column 2"), "{err}");

        let f = file("a,b\n1,2\n3\n");
        let err = load_csv::<f64>(f.path(), &CsvSchema::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3") && err.contains("expected 2 fields"), "{err}");
    }

    #[test]
    fn bad_label_and_empty_file() {
        let f = file("1,0\n3,7\n");
        let schema = CsvSchema {
            has_header: false,
            ..CsvSchema::default()
        }
        .with_label(LabelColumn::Index(1));
        let err = load_csv::<f64>(f.path(), &schema).unwrap_err().to_string();
        assert!(err.contains("line 2, column 2"), "{err}");

        let f = file("a,b\n");
        let err = load_csv::<f64>(f.path(), &CsvSchema::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("no data rows"), "{err}");
    }

    #[test]
    fn float_labels_accepted() {
        let f = file("x,label\n1.5,0.0\n2.5,1.0\n");
        let schema = CsvSchema::default().with_label(LabelColumn::Name("label".into()));
        let ds: Dataset<f32> = load_csv(f.path(), &schema).unwrap();
        assert_eq!(ds.labels().unwrap(), &[false, true]);
    }
}
