//! Image input (PPM P6 / P5 and PNG) and binary mask output (PPM P6).

use std::path::Path;

use glm_core::datasets::ImageBuffer;

use crate::{CliError, Result};

/// Loads a PNG or PPM/PGM image into an intensity buffer in `[0, 1]`.
pub fn load_image(path: &Path) -> Result<ImageBuffer> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let result = if bytes.starts_with(b"\x89PNG") {
        decode_png(&bytes)
    } else if bytes.starts_with(b"P6") || bytes.starts_with(b"P5") {
        decode_pnm(&bytes)
    } else {
        Err("unsupported image format (expected PNG or binary PPM/PGM)".into())
    };
    result.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn decode_png(bytes: &[u8]) -> std::result::Result<ImageBuffer, String> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let mut buffer = vec![0u8; reader.output_buffer_size().ok_or("image too large")?];
    let info = reader.next_frame(&mut buffer).map_err(|e| e.to_string())?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err("only 8-bit PNG is supported".into());
    }
    let (width, height) = (info.width as usize, info.height as usize);
    let pixels = &buffer[..info.buffer_size()];
    let (channels, stride, take): (usize, usize, usize) = match info.color_type {
        png::ColorType::Grayscale => (1, 1, 1),
        png::ColorType::GrayscaleAlpha => (1, 2, 1),
        png::ColorType::Rgb => (3, 3, 3),
        png::ColorType::Rgba => (3, 4, 3),
        png::ColorType::Indexed => return Err("indexed PNG is not supported".into()),
    };
    let mut data = Vec::with_capacity(width * height * channels);
    for px in pixels.chunks_exact(stride) {
        for &v in &px[..take] {
            data.push(v as f64 / 255.0);
        }
    }
    ImageBuffer::new(width, height, channels, data).map_err(|e| e.to_string())
}

fn decode_pnm(bytes: &[u8]) -> std::result::Result<ImageBuffer, String> {
    let channels = if bytes.starts_with(b"P6") { 3 } else { 1 };
    // header: magic, width, height, maxval as whitespace-separated tokens,
    // with '#' comments; a single whitespace byte follows maxval
    let mut pos = 2usize;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // skip whitespace and comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(format!("bad header near byte {pos}"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| "header value out of range".to_string())?;
    }
    let (width, height, maxval) = (fields[0], fields[1], fields[2]);
    if maxval == 0 || maxval > 255 {
        return Err(format!("unsupported maxval {maxval}"));
    }
    pos += 1; // single whitespace after maxval
    let expected = width * height * channels;
    let raster = bytes
        .get(pos..pos + expected)
        .ok_or(format!("truncated raster at byte {pos}"))?;
    let data = raster.iter().map(|&b| b as f64 / maxval as f64).collect();
    ImageBuffer::new(width, height, channels, data).map_err(|e| e.to_string())
}

/// Writes a binary PPM (P6) from 8-bit RGB data.
pub fn write_ppm(path: &Path, width: usize, height: usize, rgb: &[u8]) -> Result<()> {
    if rgb.len() != width * height * 3 {
        return Err(CliError::Config(format!(
            "raster size {} does not match {width}x{height}x3",
            rgb.len()
        )));
    }
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(rgb);
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
