//! IDX image/label files (the MNIST container format).
//!
//! Big-endian magic: `0x00000803` for u8 image tensors `[n, rows, cols]`,
//! `0x00000801` for u8 label vectors `[n]`. Pixels are scaled to `[0, 1]`;
//! no other preprocessing.

use std::path::Path;

use glm_core::datasets::Dataset;

use crate::{CliError, Result};

const MAGIC_IMAGES: u32 = 0x0000_0803;
const MAGIC_LABELS: u32 = 0x0000_0801;

fn read_u32_be(bytes: &[u8], offset: usize, what: &str) -> std::result::Result<u32, String> {
    let slice = bytes
        .get(offset..offset + 4)
        .ok_or(format!("truncated at offset {offset} reading {what}"))?;
    Ok(u32::from_be_bytes([slice[0], slice[1], slice[2], slice[3]]))
}

/// Raw image tensor: `(pixels scaled to [0,1], n, rows, cols)`.
pub fn load_idx_images(path: &Path) -> Result<(Vec<f64>, usize, usize, usize)> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_idx_images(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn parse_idx_images(bytes: &[u8]) -> std::result::Result<(Vec<f64>, usize, usize, usize), String> {
    let magic = read_u32_be(bytes, 0, "magic")?;
    if magic != MAGIC_IMAGES {
        return Err(format!(
            "bad magic {magic:#010x} at offset 0 (expected {MAGIC_IMAGES:#010x})"
        ));
    }
    let n = read_u32_be(bytes, 4, "count")? as usize;
    let rows = read_u32_be(bytes, 8, "rows")? as usize;
    let cols = read_u32_be(bytes, 12, "cols")? as usize;
    let expected = 16 + n * rows * cols;
    if bytes.len() < expected {
        return Err(format!(
            "truncated at offset {}: need {expected} bytes for {n} images of {rows}x{cols}",
            bytes.len()
        ));
    }
    let pixels = bytes[16..expected]
        .iter()
        .map(|&b| b as f64 / 255.0)
        .collect();
    Ok((pixels, n, rows, cols))
}

pub fn load_idx_labels(path: &Path) -> Result<Vec<usize>> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_idx_labels(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn parse_idx_labels(bytes: &[u8]) -> std::result::Result<Vec<usize>, String> {
    let magic = read_u32_be(bytes, 0, "magic")?;
    if magic != MAGIC_LABELS {
        return Err(format!(
            "bad magic {magic:#010x} at offset 0 (expected {MAGIC_LABELS:#010x})"
        ));
    }
    let n = read_u32_be(bytes, 4, "count")? as usize;
    let expected = 8 + n;
    if bytes.len() < expected {
        return Err(format!(
            "truncated at offset {}: need {expected} bytes for {n} labels",
            bytes.len()
        ));
    }
    Ok(bytes[8..expected].iter().map(|&b| b as usize).collect())
}

/// Loads one or more image/label file pairs and concatenates them into a
/// labeled data set (`d = rows * cols`).
pub fn load_idx_dataset(pairs: &[(std::path::PathBuf, std::path::PathBuf)]) -> Result<Dataset> {
    if pairs.is_empty() {
        return Err(CliError::Config("no IDX file pairs given".into()));
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut dim = None;
    for (images_path, labels_path) in pairs {
        let (pixels, n, rows, cols) = load_idx_images(images_path)?;
        let d = rows * cols;
        match dim {
            None => dim = Some(d),
            Some(prev) if prev != d => {
                return Err(CliError::Config(format!(
                    "{}: image size {rows}x{cols} differs from earlier files",
                    images_path.display()
                )));
            }
            _ => {}
        }
        let file_labels = load_idx_labels(labels_path)?;
        if file_labels.len() != n {
            return Err(CliError::Config(format!(
                "{}: {} labels for {n} images",
                labels_path.display(),
                file_labels.len()
            )));
        }
        points.extend_from_slice(&pixels);
        labels.extend_from_slice(&file_labels);
    }
    let n = labels.len();
    let num_classes = labels.iter().copied().max().unwrap_or(0) + 1;
    Dataset::with_labels(points, n, dim.unwrap(), labels, num_classes)
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Serializes images (u8 pixels) and labels into IDX bytes; used by tests
/// and for exporting subsamples.
pub fn encode_idx_images(pixels: &[u8], n: usize, rows: usize, cols: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + pixels.len());
    out.extend_from_slice(&MAGIC_IMAGES.to_be_bytes());
    out.extend_from_slice(&(n as u32).to_be_bytes());
    out.extend_from_slice(&(rows as u32).to_be_bytes());
    out.extend_from_slice(&(cols as u32).to_be_bytes());
    out.extend_from_slice(pixels);
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&MAGIC_LABELS.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
