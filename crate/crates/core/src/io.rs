//! CSV ingestion and report/label output.
//!
//! Input convention: comma-separated numeric rows, decimal point '.', an
//! optional single header row, and an optional label column holding
//! integer-coded class ids. Labels are remapped to dense 0-based ids in
//! ascending numeric order of the raw values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::ExperimentReport;
use crate::model::{Dataset, OUTLIER_LABEL};

/// A dataset plus optional ground-truth labels.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub dataset: Dataset,
    pub truth: Option<Vec<usize>>,
    pub name: String,
}

impl LabeledDataset {
    /// Ground truth, or a contract error for operations that need it.
    pub fn truth(&self) -> Result<&[usize]> {
        self.truth
            .as_deref()
            .ok_or_else(|| Error::contract(format!("dataset '{}' has no ground-truth labels", self.name)))
    }
}

/// Loads a numeric CSV. `label_column` (0-based) marks the ground-truth
/// column; all other columns become coordinates.
pub fn load_csv(path: &Path, has_header: bool, label_column: Option<usize>) -> Result<LabeledDataset> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut width = None;
    for (line_idx, line) in text.lines().enumerate() {
        if has_header && line_idx == 0 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let row_no = line_idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    row: row_no,
                    col: cells.len(),
                    message: format!("ragged row: expected {} cells, found {}", w, cells.len()),
                });
            }
            _ => {}
        }
        if let Some(lc) = label_column {
            if lc >= cells.len() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    row: row_no,
                    col: lc + 1,
                    message: format!("label column {} out of range for {} cells", lc, cells.len()),
                });
            }
        }
        let mut coords = Vec::with_capacity(cells.len());
        for (ci, cell) in cells.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                row: row_no,
                col: ci + 1,
                message: format!("not a number: {:?}", cell.trim()),
            })?;
            if label_column == Some(ci) {
                raw_labels.push(value);
            } else {
                coords.push(value);
            }
        }
        rows.push(coords);
    }
    let dataset = Dataset::from_rows(rows)?;
    let truth = if label_column.is_some() {
        Some(densify_labels(&raw_labels))
    } else {
        None
    };
    Ok(LabeledDataset { dataset, truth, name })
}

/// Maps raw numeric label values to dense 0-based ids in ascending order.
fn densify_labels(raw: &[f64]) -> Vec<usize> {
    let mut distinct: Vec<f64> = raw.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    raw.iter()
        .map(|v| distinct.partition_point(|d| d < v))
        .collect()
}

/// Writes a dataset as CSV: coordinates, then the label column if present.
/// Floats use Rust's shortest round-trip formatting.
pub fn write_dataset_csv(path: &Path, data: &LabeledDataset) -> Result<()> {
    let mut out = String::new();
    for (i, p) in data.dataset.iter_points().enumerate() {
        let mut cells: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        if let Some(truth) = &data.truth {
            cells.push(truth[i].to_string());
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    write_file(path, &out)
}

/// Writes per-point labels as `point,label` rows; outliers are -1.
pub fn write_labels_csv(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = String::from("point,label\n");
    for (i, &l) in labels.iter().enumerate() {
        if l == OUTLIER_LABEL {
            let _ = writeln!(out, "{},-1", i);
        } else {
            let _ = writeln!(out, "{},{}", i, l);
        }
    }
    write_file(path, &out)
}

/// Writes benchmark reports with the schema `dataset,spec,median,iqr,trials`.
pub fn write_report_csv(path: &Path, reports: &[ExperimentReport]) -> Result<()> {
    write_file(path, &report_csv_string(reports))
}

pub fn report_csv_string(reports: &[ExperimentReport]) -> String {
    let mut out = String::from("dataset,spec,median,iqr,trials\n");
    for r in reports {
        let _ = writeln!(out, "{},{},{},{},{}", r.dataset, r.spec, r.median, r.iqr, r.trials);
    }
    out
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmp_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_unlabeled_two_by_two() {
        let f = tmp_csv("0,0\n1,1\n");
        let data = load_csv(f.path(), false, None).unwrap();
        assert_eq!(data.dataset.n(), 2);
        assert_eq!(data.dataset.dim(), 2);
        assert!(data.truth.is_none());
    }

    #[test]
    fn loads_label_column_and_densifies() {
        let f = tmp_csv("0,0,1\n1,1,2\n");
        let data = load_csv(f.path(), false, Some(2)).unwrap();
        assert_eq!(data.dataset.dim(), 2);
        assert_eq!(data.truth.unwrap(), vec![0, 1]);
    }

    #[test]
    fn header_row_is_skipped() {
        let f = tmp_csv("x,y\n0.5,1.5\n");
        let data = load_csv(f.path(), true, None).unwrap();
        assert_eq!(data.dataset.n(), 1);
        assert_eq!(data.dataset.point(0), &[0.5, 1.5]);
    }

    #[test]
    fn parse_error_reports_position() {
        let f = tmp_csv("0,0\n1,oops\n");
        match load_csv(f.path(), false, None) {
            Err(Error::Parse { row, col, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(col, 2);
            }
            other => panic!("expected parse error, got {:?}", other.map(|d| d.dataset.n())),
        }
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let f = tmp_csv("0,0\n1\n");
        assert!(matches!(load_csv(f.path(), false, None), Err(Error::Parse { .. })));
    }

    #[test]
    fn missing_file_is_io_error_with_path() {
        let err = load_csv(Path::new("/nonexistent/x.csv"), false, None).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.csv"));
    }

    #[test]
    fn roundtrip_preserves_numeric_content() {
        let f = tmp_csv("0.123456789012345,-7.25,3\n1e-9,42.0,5\n");
        let data = load_csv(f.path(), false, Some(2)).unwrap();
        let out = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        write_dataset_csv(out.path(), &data).unwrap();
        let reloaded = load_csv(out.path(), false, Some(2)).unwrap();
        assert_eq!(data.dataset, reloaded.dataset);
        assert_eq!(data.truth, reloaded.truth);
    }

    #[test]
    fn labels_csv_marks_outliers() {
        let out = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        write_labels_csv(out.path(), &[0, 1, OUTLIER_LABEL]).unwrap();
        let text = std::fs::read_to_string(out.path()).unwrap();
        assert_eq!(text, "point,label\n0,0\n1,1\n2,-1\n");
    }
}
