//! Pixel-neighborhood feature extraction for image segmentation.

use alloc::format;
use alloc::vec::Vec;

use super::Dataset;
use crate::{Error, Result};

/// In-memory image with intensities in `[0, 1]`.
///
/// Layout: `data[(y * width + x) * channels + c]`.
#[derive(Debug, Clone)]
pub struct ImageBuffer {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if !(channels == 1 || channels == 3) {
            return Err(Error::InvalidData(format!(
                "expected 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::SizeMismatch {
                expected: width * height * channels,
                got: data.len(),
            });
        }
        Ok(ImageBuffer {
            width,
            height,
            channels,
            data,
        })
    }

    #[inline]
    pub fn sample(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }
}

/// One feature vector per pixel: the intensities of the `patch x patch`
/// neighborhood, per channel, channels concatenated.
///
/// Borders are replicate-padded. `patch` must be odd and fit in the image.
/// Output dimension is `patch * patch * channels`, row order matches pixel
/// order `y * width + x`.
pub fn patch_features(image: &ImageBuffer, patch: usize) -> Result<Dataset> {
    if patch == 0 || patch.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "patch size must be odd and >= 1, got {patch}"
        )));
    }
    if patch > image.width || patch > image.height {
        return Err(Error::InvalidConfig(format!(
            "patch {patch} exceeds image {}x{}",
            image.width, image.height
        )));
    }
    let radius = (patch / 2) as isize;
    let n = image.width * image.height;
    let dim = patch * patch * image.channels;
    let mut points = Vec::with_capacity(n * dim);

    for y in 0..image.height as isize {
        for x in 0..image.width as isize {
            for c in 0..image.channels {
                for dy in -radius..=radius {
                    let sy = (y + dy).clamp(0, image.height as isize - 1) as usize;
                    for dx in -radius..=radius {
                        let sx = (x + dx).clamp(0, image.width as isize - 1) as usize;
                        points.push(image.sample(sx, sy, c));
                    }
                }
            }
        }
    }
    Dataset::new(points, n, dim)
}
