//! Binary graph cache.
//!
//! Layout (little-endian): magic `GLGR`, version `u32`, `n: u64`, then the
//! CSR arrays: row offsets (`n + 1` u64), column indices (`nnz` u64),
//! weights (`nnz` f64), degrees (`n` f64).

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use glm_core::graph::SimilarityGraph;

use crate::{CliError, Result};

const MAGIC: &[u8; 4] = b"GLGR";
const VERSION: u32 = 1;

pub fn write_graph_cache(path: &Path, graph: &SimilarityGraph) -> Result<()> {
    let file =
        std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    out.write_all(MAGIC).map_err(io_err)?;
    out.write_all(&VERSION.to_le_bytes()).map_err(io_err)?;
    out.write_all(&(graph.len() as u64).to_le_bytes()).map_err(io_err)?;
    for &offset in graph.row_offsets() {
        out.write_all(&(offset as u64).to_le_bytes()).map_err(io_err)?;
    }
    for &col in graph.col_indices() {
        out.write_all(&(col as u64).to_le_bytes()).map_err(io_err)?;
    }
    for &w in graph.weights() {
        out.write_all(&w.to_le_bytes()).map_err(io_err)?;
    }
    for &d in graph.degrees() {
        out.write_all(&d.to_le_bytes()).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn load_graph_cache(path: &Path) -> Result<SimilarityGraph> {
    let mut file =
        std::fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_graph_cache(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn parse_graph_cache(bytes: &[u8]) -> std::result::Result<SimilarityGraph, String> {
    let mut pos = 0usize;
    let take = |pos: &mut usize, len: usize| -> std::result::Result<&[u8], String> {
        let slice = bytes
            .get(*pos..*pos + len)
            .ok_or(format!("truncated at offset {pos}"))?;
        *pos += len;
        Ok(slice)
    };
    let magic = take(&mut pos, 4)?;
    if magic != MAGIC {
        return Err(format!("bad magic {magic:?} at offset 0"));
    }
    let version = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let n = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()) as usize;

    let read_u64s = |pos: &mut usize, count: usize| -> std::result::Result<Vec<usize>, String> {
        let slice = bytes
            .get(*pos..*pos + count * 8)
            .ok_or(format!("truncated at offset {pos}"))?;
        *pos += count * 8;
        Ok(slice
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()) as usize)
            .collect())
    };
    let read_f64s = |pos: &mut usize, count: usize| -> std::result::Result<Vec<f64>, String> {
        let slice = bytes
            .get(*pos..*pos + count * 8)
            .ok_or(format!("truncated at offset {pos}"))?;
        *pos += count * 8;
        Ok(slice
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    };

    let row_offsets = read_u64s(&mut pos, n + 1)?;
    let nnz = *row_offsets.last().ok_or("empty offsets")?;
    let col_indices = read_u64s(&mut pos, nnz)?;
    let weights = read_f64s(&mut pos, nnz)?;
    let degrees = read_f64s(&mut pos, n)?;
    if pos != bytes.len() {
        return Err(format!("{} trailing bytes at offset {pos}", bytes.len() - pos));
    }
    SimilarityGraph::from_parts(n, row_offsets, col_indices, weights, degrees)
        .map_err(|e| e.to_string())
}
