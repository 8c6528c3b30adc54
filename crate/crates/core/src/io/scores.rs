use std::fs;
use std::path::Path;

use crate::detect::ScoreReport;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::write_atomically;

pub const SCORES_HEADER: &str = "index,outlier_factor,rank,predicted";

/// One row per object in original order: index, outlier factor (shortest
/// round-trip form), 1-based descending rank, and 0/1 prediction.
pub fn write_scores<S: Scalar>(report: &ScoreReport<S>, path: impl AsRef<Path>) -> Result<()> {
    let ranks = report.ranks();
    write_atomically(path.as_ref(), |out| {
        writeln!(out, "{SCORES_HEADER}")?;
        for (i, (of, p)) in report.outlier_factors().iter().zip(report.predicted()).enumerate() {
            writeln!(out, "{i},{of},{},{}", ranks[i], u8::from(*p))?;
        }
        Ok(())
    })
}

/// Reads a file produced by [`write_scores`] back into a report.
pub fn read_scores<S: Scalar>(path: impl AsRef<Path>) -> Result<ScoreReport<S>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(SCORES_HEADER) {
        return Err(Error::format(path, format!("expected header {SCORES_HEADER:?}")));
    }
    let err = |line: usize, column: usize, message: &str| Error::Parse {
        path: path.to_path_buf(),
        line: line as u64 + 2,
        column,
        message: message.to_string(),
    };
    let mut of = Vec::new();
    let mut flagged = 0;
    for (l, row) in lines.enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != 4 {
            return Err(err(l, 0, "expected 4 fields"));
        }
        if cells[0].parse::<usize>().ok() != Some(l) {
            return Err(err(l, 1, "rows must be in index order"));
        }
        of.push(cells[1].parse::<S>().map_err(|_| err(l, 2, "bad outlier factor"))?);
        match cells[3] {
            "1" => flagged += 1,
            "0" => {}
            _ => return Err(err(l, 4, "predicted must be 0 or 1")),
        }
    }
    ScoreReport::from_scores(of, flagged)
}

/// One `0`/`1` per line.
pub fn write_labels(labels: &[bool], path: impl AsRef<Path>) -> Result<()> {
    write_atomically(path.as_ref(), |out| {
        for &l in labels {
            writeln!(out, "{}", u8::from(l))?;
        }
        Ok(())
    })
}

/// Reads one `0`/`1` per line; blank lines and an optional leading
/// `label` header are skipped.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<bool>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Vec::new();
    for (l, line) in text.lines().enumerate() {
        match line.trim() {
            "" => {}
            "label" if labels.is_empty() => {}
            "0" => labels.push(false),
            "1" => labels.push(true),
            other => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: l as u64 + 1,
                    column: 1,
                    message: format!("label {other:?} is not 0 or 1"),
                })
            }
        }
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_rows_plus_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let report = ScoreReport::from_scores(vec![0.1, 2.0 / 3.0, 0.25], 1).unwrap();
        write_scores(&report, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], SCORES_HEADER);
        assert_eq!(lines[2], "1,0.6666666666666666,1,1");
        assert_eq!(read_scores::<f64>(&p).unwrap(), report);
    }

    #[test]
    fn zero_budget_writes_all_zero_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_scores(&ScoreReport::from_scores(vec![3.0, 1.0], 0).unwrap(), &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.lines().skip(1).all(|l| l.ends_with(",0")));
    }

    #[test]
    fn failed_write_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("missing").join("s.csv");
        let report = ScoreReport::from_scores(vec![1.0, 2.0], 0).unwrap();
        assert!(matches!(write_scores(&report, &p), Err(Error::Io { .. })));
        assert!(!p.exists());
    }

    #[test]
    fn labels_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.txt");
        write_labels(&[true, false, false], &p).unwrap();
        assert_eq!(read_labels(&p).unwrap(), vec![true, false, false]);
        fs::write(&p, "label\n0\n\n1\n").unwrap();
        assert_eq!(read_labels(&p).unwrap(), vec![false, true]);
        fs::write(&p, "0\n2\n").unwrap();
        assert!(read_labels(&p).is_err());
    }
}
