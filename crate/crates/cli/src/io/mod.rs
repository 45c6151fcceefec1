//! File formats: numeric CSV datasets, IDX image/label files, PPM/PNG
//! images and the binary graph cache.

pub mod cache;
pub mod csv;
pub mod idx;
pub mod image;
