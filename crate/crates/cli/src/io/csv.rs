//! Numeric CSV datasets: one row per point, optional header, optional
//! integer label column (by name or index).

use std::fmt::Write as _;
use std::path::Path;

use glm_core::datasets::Dataset;

use crate::{CliError, Result};

/// Writes a dataset as CSV with header `x0,..,x{d-1}[,label]`.
pub fn write_dataset_csv(path: &Path, data: &Dataset) -> Result<()> {
    let mut out = String::new();
    let dim = data.dim();
    for d in 0..dim {
        if d > 0 {
            out.push(',');
        }
        let _ = write!(out, "x{d}");
    }
    if data.labels().is_some() {
        out.push_str(",label");
    }
    out.push('\n');
    for i in 0..data.len() {
        let point = data.point(i);
        for (d, v) in point.iter().enumerate() {
            if d > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        if let Some(labels) = data.labels() {
            let _ = write!(out, ",{}", labels[i]);
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Loads a numeric CSV. `label_column` may be a header name or a 0-based
/// column index; when omitted, a header column named `label` is used if
/// present, otherwise the data set is unlabeled.
pub fn load_csv_dataset(path: &Path, label_column: Option<&str>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_csv_dataset(&text, label_column)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn parse_csv_dataset(
    text: &str,
    label_column: Option<&str>,
) -> std::result::Result<Dataset, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first_no, first) = lines.next().ok_or("empty file")?;
    let first_cells: Vec<&str> = first.split(',').map(str::trim).collect();
    let has_header = first_cells.iter().any(|c| c.parse::<f64>().is_err());
    let header: Option<Vec<String>> = has_header.then(|| {
        first_cells
            .iter()
            .map(|c| c.trim_matches('"').to_string())
            .collect()
    });
    let width = first_cells.len();

    // resolve the label column index
    let label_idx: Option<usize> = match label_column {
        Some(spec) => {
            if let Some(names) = &header {
                match names.iter().position(|n| n == spec) {
                    Some(idx) => Some(idx),
                    None => match spec.parse::<usize>() {
                        Ok(idx) if idx < width => Some(idx),
                        _ => return Err(format!("no column named or indexed '{spec}'")),
                    },
                }
            } else {
                match spec.parse::<usize>() {
                    Ok(idx) if idx < width => Some(idx),
                    _ => return Err(format!("label column '{spec}' must be an index < {width}")),
                }
            }
        }
        None => header
            .as_ref()
            .and_then(|names| names.iter().position(|n| n == "label")),
    };

    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0usize;
    let data_lines = if has_header {
        None.into_iter().chain(lines)
    } else {
        Some((first_no, first)).into_iter().chain(lines)
    };
    for (line_no, line) in data_lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != width {
            return Err(format!(
                "line {line_no}: expected {width} cells, got {}",
                cells.len()
            ));
        }
        for (c, cell) in cells.iter().enumerate() {
            let value: f64 = cell
                .parse()
                .map_err(|_| format!("line {line_no}: non-numeric cell '{cell}'"))?;
            if Some(c) == label_idx {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(format!(
                        "line {line_no}: label '{cell}' is not a non-negative integer"
                    ));
                }
                labels.push(value as usize);
            } else {
                points.push(value);
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err("no data rows".into());
    }

    let dim = width - usize::from(label_idx.is_some());
    if label_idx.is_some() {
        let num_classes = labels.iter().copied().max().unwrap_or(0) + 1;
        Dataset::with_labels(points, rows, dim, labels, num_classes)
            .map_err(|e| e.to_string())
    } else {
        Dataset::new(points, rows, dim).map_err(|e| e.to_string())
    }
}

/// Scribble file for image segmentation: rows of `x,y,class`
/// (header optional).
pub fn load_scribbles(path: &Path) -> Result<Vec<(usize, usize, usize)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if i == 0 && cells.iter().any(|c| c.parse::<usize>().is_err()) {
            continue; // header
        }
        if cells.len() != 3 {
            return Err(CliError::Config(format!(
                "{}: line {}: expected x,y,class",
                path.display(),
                i + 1
            )));
        }
        let parse = |cell: &str| -> Result<usize> {
            cell.parse().map_err(|_| {
                CliError::Config(format!(
                    "{}: line {}: bad value '{cell}'",
                    path.display(),
                    i + 1
                ))
            })
        };
        out.push((parse(cells[0])?, parse(cells[1])?, parse(cells[2])?));
    }
    if out.is_empty() {
        return Err(CliError::Config(format!(
            "{}: no scribbles",
            path.display()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_labels() {
        let data = glm_core::datasets::three_moons_with_noise(1, 0.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("moons.csv");
        write_dataset_csv(&path, &data).unwrap();
        let loaded = load_csv_dataset(&path, None).unwrap();
        assert_eq!(loaded.len(), data.len());
        assert_eq!(loaded.dim(), data.dim());
        assert_eq!(loaded.labels(), data.labels());
        // shortest round-trip float formatting preserves exact values
        assert_eq!(loaded.points(), data.points());
    }

    #[test]
    fn headerless_with_label_index() {
        let data = parse_csv_dataset("1.0,2.0,0\n3.5,4.5,1\n0.0,0.1,1\n", Some("2")).unwrap();
        assert_eq!(data.len(), 3);
        assert_eq!(data.dim(), 2);
        assert_eq!(data.labels().unwrap(), &[0, 1, 1]);
    }

    #[test]
    fn header_without_label_column_gives_unlabeled() {
        let data = parse_csv_dataset("a,b\n1,2\n3,4\n", None).unwrap();
        assert!(data.labels().is_none());
        assert_eq!(data.dim(), 2);
    }

    #[test]
    fn ragged_row_reports_line_number() {
        let err = parse_csv_dataset("1,2\n3\n", None).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn non_numeric_cell_reports_line_number() {
        let err = parse_csv_dataset("1,2\n3,x\n5,6\n", None).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(parse_csv_dataset("", None).is_err());
        assert!(parse_csv_dataset("a,b\n", None).is_err());
    }

    #[test]
    fn scribbles_parse_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        std::fs::write(&path, "x,y,class\n3,4,0\n10,2,1\n").unwrap();
        let s = load_scribbles(&path).unwrap();
        assert_eq!(s, vec![(3, 4, 0), (10, 2, 1)]);
    }
}
