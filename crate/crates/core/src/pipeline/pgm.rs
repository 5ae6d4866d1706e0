//! Binary PGM (P5) images and their JSON metadata sidecars.
//!
//! Rows are written top to bottom, i.e. from the largest y coordinate of the
//! grid to the smallest. 16-bit samples are big-endian.

use std::path::{Path, PathBuf};

use crate::bench::{CCDImage, CaptureMetadata};
use crate::error::{Error, Result};
use crate::fields::{GridSpec, IntensityMap};

/// Decoded P5 image, samples in file order (top row first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

impl Pgm {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        if self.maxval > 255 {
            out.reserve(self.samples.len() * 2);
            for s in &self.samples {
                out.extend_from_slice(&s.to_be_bytes());
            }
        } else {
            out.extend(self.samples.iter().map(|&s| s as u8));
        }
        out
    }

    pub fn decode(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: &str| Error::Pgm {
            path: path.to_path_buf(),
            reason: reason.to_string(),
        };
        let mut pos = 0usize;
        let mut token = || -> Result<String> {
            loop {
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
        };
        if token()? != "P5" {
            return Err(bad("not a binary PGM (P5)"));
        }
        let mut number = |what: &str| -> Result<usize> {
            token()?
                .parse::<usize>()
                .map_err(|_| bad(&format!("invalid {what}")))
        };
        let width = number("width")?;
        let height = number("height")?;
        let maxval = number("maxval")?;
        if maxval == 0 || maxval > 65535 {
            return Err(bad("maxval outside 1..=65535"));
        }
        // Exactly one whitespace byte separates the header from the raster.
        pos += 1;
        let count = width * height;
        let wide = maxval > 255;
        let needed = count * if wide { 2 } else { 1 };
        let raster = bytes
            .get(pos..pos + needed)
            .ok_or_else(|| bad("truncated raster"))?;
        let samples: Vec<u16> = if wide {
            raster
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]))
                .collect()
        } else {
            raster.iter().map(|&b| u16::from(b)).collect()
        };
        if samples.iter().any(|&s| usize::from(s) > maxval) {
            return Err(bad("sample exceeds maxval"));
        }
        Ok(Self {
            width,
            height,
            maxval: maxval as u16,
            samples,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes, path)
    }

    /// Square image from samples in grid storage order (bottom row first).
    pub fn from_grid_order(n: usize, maxval: u16, grid_samples: &[u16]) -> Self {
        let mut samples = Vec::with_capacity(n * n);
        for iy in (0..n).rev() {
            samples.extend_from_slice(&grid_samples[iy * n..(iy + 1) * n]);
        }
        Self {
            width: n,
            height: n,
            maxval,
            samples,
        }
    }

    /// Samples reordered to grid storage order; only valid for square images.
    pub fn to_grid_order(&self) -> Result<Vec<u16>> {
        if self.width != self.height {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} image is not square",
                self.width, self.height
            )));
        }
        let n = self.width;
        let mut out = Vec::with_capacity(n * n);
        for row in (0..n).rev() {
            out.extend_from_slice(&self.samples[row * n..(row + 1) * n]);
        }
        Ok(out)
    }
}

pub fn ccd_to_pgm(img: &CCDImage<f64>) -> Pgm {
    Pgm::from_grid_order(img.grid().n(), img.metadata.noise.max_count(), img.counts())
}

/// Real map rendered with its peak at `maxval`.
pub fn map_to_pgm(map: &IntensityMap<f64>, maxval: u16) -> Pgm {
    let peak = map.max();
    let scale = if peak > 0.0 {
        f64::from(maxval) / peak
    } else {
        0.0
    };
    let counts: Vec<u16> = map
        .samples()
        .iter()
        .map(|&v| (v * scale).round().clamp(0.0, f64::from(maxval)) as u16)
        .collect();
    Pgm::from_grid_order(map.grid().n(), maxval, &counts)
}

/// `foo.pgm` → `foo.json`
pub fn sidecar_path(image: &Path) -> PathBuf {
    image.with_extension("json")
}

pub fn metadata_json(meta: &CaptureMetadata) -> Result<Vec<u8>> {
    let mut text = serde_json::to_vec_pretty(meta)?;
    text.push(b'\n');
    Ok(text)
}

/// Reads an image and, when present, its sidecar. Without a sidecar the grid
/// falls back to the default extent and waist at the image's resolution.
pub fn read_capture(path: &Path) -> Result<CCDImage<f64>> {
    let pgm = Pgm::read(path)?;
    let counts = pgm.to_grid_order()?;
    let side = sidecar_path(path);
    let mut metadata = if side.exists() {
        let text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
        let meta: CaptureMetadata = serde_json::from_str(&text)?;
        if meta.n != pgm.width {
            return Err(Error::ShapeMismatch(format!(
                "{} is {}x{} but its sidecar says n = {}",
                path.display(),
                pgm.width,
                pgm.height,
                meta.n
            )));
        }
        meta
    } else {
        let defaults = GridSpec::default();
        CaptureMetadata {
            n: pgm.width,
            half_extent: defaults.half_extent(),
            waist: defaults.waist(),
            noise: crate::bench::NoiseModel::noiseless(),
            exposure_id: 0,
            saturation_fraction: 0.0,
        }
    };
    metadata.noise.bit_depth = if pgm.maxval > 255 { 16 } else { 8 };
    let grid = GridSpec::new(metadata.n, metadata.half_extent, metadata.waist)?;
    CCDImage::from_counts(grid, counts, metadata)
}
