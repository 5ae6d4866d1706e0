//! CCD capture model: frame jitter, arm misalignment, shot noise, read
//! noise and quantization.
//!
//! Every random draw comes from a generator keyed by
//! `(seed, exposure_id, pixel)`, so a capture is a pure function of its
//! inputs no matter how pixels are scheduled.

use rand::SeedableRng;
use rand_distr::{Distribution, Normal, Poisson};
use rand_pcg::Pcg64Mcg;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{GridSpec, IntensityMap};
use crate::scalar::Real;

/// Pixel slot reserved for per-frame draws.
const FRAME_SLOT: u64 = u64::MAX;

/// Sensor and illumination noise parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// Expected photoelectrons at unit intensity; 0 disables shot noise.
    pub photon_scale: f64,
    /// Additive Gaussian read noise, in counts.
    pub read_sigma: f64,
    /// Per-frame multiplicative intensity fluctuation.
    pub intensity_jitter_sigma: f64,
    /// Translation of the φ⁺ arm, in pixels.
    pub misalign_dx: f64,
    pub misalign_dy: f64,
    pub bit_depth: u8,
    pub seed: u64,
    /// ADC gain: counts per detected photoelectron.
    pub counts_per_photon: f64,
}

impl Default for NoiseModel {
    /// The reference noise profile used for sweeps.
    fn default() -> Self {
        Self {
            photon_scale: 1e5,
            read_sigma: 2.0,
            intensity_jitter_sigma: 0.01,
            misalign_dx: 0.0,
            misalign_dy: 0.0,
            bit_depth: 16,
            seed: 0,
            counts_per_photon: 1.0,
        }
    }
}

impl NoiseModel {
    /// Quantization only; the brightest pixel maps to full scale.
    pub fn noiseless() -> Self {
        Self {
            photon_scale: 0.0,
            read_sigma: 0.0,
            intensity_jitter_sigma: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let magnitudes = [
            ("photon_scale", self.photon_scale),
            ("read_sigma", self.read_sigma),
            ("intensity_jitter_sigma", self.intensity_jitter_sigma),
        ];
        for (name, v) in magnitudes {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} = {v} must be finite and >= 0"
                )));
            }
        }
        if !self.misalign_dx.is_finite() || !self.misalign_dy.is_finite() {
            return Err(Error::InvalidInput("misalignment must be finite".into()));
        }
        if !(self.counts_per_photon.is_finite() && self.counts_per_photon > 0.0) {
            return Err(Error::InvalidInput("counts_per_photon must be > 0".into()));
        }
        if self.bit_depth != 8 && self.bit_depth != 16 {
            return Err(Error::InvalidInput(format!(
                "bit_depth = {} (expected 8 or 16)",
                self.bit_depth
            )));
        }
        Ok(())
    }

    pub fn max_count(&self) -> u16 {
        ((1u32 << self.bit_depth) - 1) as u16
    }

    pub fn has_misalignment(&self) -> bool {
        self.misalign_dx != 0.0 || self.misalign_dy != 0.0
    }

    pub fn without_misalignment(&self) -> Self {
        Self {
            misalign_dx: 0.0,
            misalign_dy: 0.0,
            ..self.clone()
        }
    }

    /// Every noise source multiplied by `factor` at unchanged mean counts.
    ///
    /// Shot noise scales through the photon budget (relative spread ∝ 1/√N)
    /// with the ADC gain raised to compensate.
    pub fn scaled(&self, factor: f64) -> Self {
        let f2 = factor * factor;
        Self {
            photon_scale: if self.photon_scale > 0.0 && factor > 0.0 {
                self.photon_scale / f2
            } else {
                0.0
            },
            counts_per_photon: if factor > 0.0 {
                self.counts_per_photon * f2
            } else {
                self.counts_per_photon
            },
            read_sigma: self.read_sigma * factor,
            intensity_jitter_sigma: self.intensity_jitter_sigma * factor,
            misalign_dx: self.misalign_dx * factor,
            misalign_dy: self.misalign_dy * factor,
            ..self.clone()
        }
    }
}

/// Sidecar data carried with every capture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptureMetadata {
    pub n: usize,
    pub half_extent: f64,
    pub waist: f64,
    pub noise: NoiseModel,
    pub exposure_id: u64,
    pub saturation_fraction: f64,
}

/// Quantized sensor frame in grid storage order.
#[derive(Clone, Debug, PartialEq)]
pub struct CCDImage<T> {
    grid: GridSpec<T>,
    counts: Vec<u16>,
    bit_depth: u8,
    pub metadata: CaptureMetadata,
}

impl<T: Real> CCDImage<T> {
    /// Image read back from disk; the metadata must describe `grid`.
    pub fn from_counts(
        grid: GridSpec<T>,
        counts: Vec<u16>,
        metadata: CaptureMetadata,
    ) -> Result<Self> {
        if counts.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} counts for a {}x{} grid",
                counts.len(),
                grid.n(),
                grid.n()
            )));
        }
        let bit_depth = metadata.noise.bit_depth;
        let max = metadata.noise.max_count();
        if counts.iter().any(|&c| c > max) {
            return Err(Error::InvalidInput(format!(
                "counts exceed {bit_depth}-bit range"
            )));
        }
        Ok(Self {
            grid,
            counts,
            bit_depth,
            metadata,
        })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn counts(&self) -> &[u16] {
        &self.counts
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn pixel_rng(seed: u64, exposure_id: u64, slot: u64) -> Pcg64Mcg {
    let key = splitmix64(seed ^ splitmix64(exposure_id ^ splitmix64(slot)));
    Pcg64Mcg::seed_from_u64(key)
}

/// Rigid translation by (dx, dy) pixels with bilinear interpolation; samples
/// falling outside the grid read as zero.
pub fn translate_bilinear<T: Real>(map: &IntensityMap<T>, dx: f64, dy: f64) -> IntensityMap<T> {
    if dx == 0.0 && dy == 0.0 {
        return map.clone();
    }
    let n = map.grid().n();
    let src = map.samples();
    let sample = |ix: i64, iy: i64| -> f64 {
        if ix < 0 || iy < 0 || ix >= n as i64 || iy >= n as i64 {
            0.0
        } else {
            src[iy as usize * n + ix as usize].to_f64_lossy()
        }
    };
    let mut out = Vec::with_capacity(n * n);
    for iy in 0..n {
        let sy = iy as f64 - dy;
        let y0 = sy.floor();
        let fy = sy - y0;
        for ix in 0..n {
            let sx = ix as f64 - dx;
            let x0 = sx.floor();
            let fx = sx - x0;
            let (x0, y0i) = (x0 as i64, y0 as i64);
            let v = (1.0 - fx) * (1.0 - fy) * sample(x0, y0i)
                + fx * (1.0 - fy) * sample(x0 + 1, y0i)
                + (1.0 - fx) * fy * sample(x0, y0i + 1)
                + fx * fy * sample(x0 + 1, y0i + 1);
            out.push(T::of(v.max(0.0)));
        }
    }
    IntensityMap::from_raw(*map.grid(), out)
}

/// Simulates one exposure of `map`.
///
/// With `photon_scale > 0` the expected photon number is `s·photon_scale·I`,
/// where `s` is the frame jitter, and each photon adds `counts_per_photon`. With `photon_scale = 0` the frame is exposed so
/// that its brightest pixel lands at full scale before jitter.
pub fn ccd_capture<T: Real>(
    map: &IntensityMap<T>,
    nm: &NoiseModel,
    exposure_id: u64,
) -> Result<CCDImage<T>> {
    nm.validate()?;
    let grid = *map.grid();
    let max_count = f64::from(nm.max_count());

    let jitter = if nm.intensity_jitter_sigma > 0.0 {
        let normal = Normal::new(1.0, nm.intensity_jitter_sigma)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        normal
            .sample(&mut pixel_rng(nm.seed, exposure_id, FRAME_SLOT))
            .max(0.0)
    } else {
        1.0
    };

    let shifted = translate_bilinear(map, nm.misalign_dx, nm.misalign_dy);
    let gain = if nm.photon_scale > 0.0 {
        nm.photon_scale
    } else {
        let peak = shifted.max().to_f64_lossy();
        if peak > 0.0 {
            max_count / peak
        } else {
            0.0
        }
    };
    let read_noise = if nm.read_sigma > 0.0 {
        Some(Normal::new(0.0, nm.read_sigma).map_err(|e| Error::InvalidInput(e.to_string()))?)
    } else {
        None
    };

    let mut saturated = 0usize;
    let counts: Vec<u16> = shifted
        .samples()
        .iter()
        .enumerate()
        .map(|(pixel, &intensity)| {
            let mean = jitter * gain * intensity.to_f64_lossy();
            let mut rng = pixel_rng(nm.seed, exposure_id, pixel as u64);
            let mut value = if nm.photon_scale > 0.0 {
                let photons = mean;
                let detected = if photons > 0.0 {
                    Poisson::new(photons)
                        .map(|p| p.sample(&mut rng))
                        .unwrap_or(photons)
                } else {
                    0.0
                };
                detected * nm.counts_per_photon
            } else {
                mean
            };
            if let Some(normal) = &read_noise {
                value += normal.sample(&mut rng);
            }
            if value > max_count {
                saturated += 1;
            }
            value.clamp(0.0, max_count).round() as u16
        })
        .collect();

    let metadata = CaptureMetadata {
        n: grid.n(),
        half_extent: grid.half_extent().to_f64_lossy(),
        waist: grid.waist().to_f64_lossy(),
        noise: nm.clone(),
        exposure_id,
        saturation_fraction: saturated as f64 / grid.len() as f64,
    };
    Ok(CCDImage {
        grid,
        counts,
        bit_depth: nm.bit_depth,
        metadata,
    })
}

/// Counts rescaled to unit integral.
pub fn normalize_image<T: Real>(img: &CCDImage<T>) -> Result<IntensityMap<T>> {
    normalize_frames(std::slice::from_ref(img))
}

/// Sum of several exposures rescaled to unit integral, equivalent to
/// normalizing their mean.
pub fn normalize_frames<T: Real>(frames: &[CCDImage<T>]) -> Result<IntensityMap<T>> {
    let first = frames
        .first()
        .ok_or_else(|| Error::InvalidInput("no frames to normalize".into()))?;
    let grid = *first.grid();
    let mut summed = vec![0u64; grid.len()];
    for f in frames {
        grid.check_same(f.grid())?;
        for (acc, &c) in summed.iter_mut().zip(f.counts.iter()) {
            *acc += u64::from(c);
        }
    }
    let total: u64 = summed.iter().sum();
    if total == 0 {
        return Err(Error::EmptyImage);
    }
    let scale = T::one() / (T::of(total as f64) * grid.cell_area());
    Ok(IntensityMap::from_raw(
        grid,
        summed
            .into_iter()
            .map(|c| T::of(c as f64) * scale)
            .collect(),
    ))
}
