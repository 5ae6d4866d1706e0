use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::NoiseModel;
use crate::discord::Branch;
use crate::error::{Error, Result};
use crate::fields::{GridSpec, DEFAULT_GRID_N, DEFAULT_HALF_EXTENT, DEFAULT_WAIST};

/// Mixture weight used when a config names neither `lambda0` nor `target_discord`.
pub const DEFAULT_LAMBDA0: f64 = 0.38;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub half_extent: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_GRID_N,
            half_extent: DEFAULT_HALF_EXTENT,
        }
    }
}

/// Source of the basis images fed to the recovery step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisSource {
    /// Blocked-arm captures taken through the simulated sensor.
    #[default]
    Measured,
    /// Noiseless analytic |ψ⁺|² and |φ⁺|².
    Analytic,
}

/// How the arm attenuators are set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArmTarget {
    Lambda0(f64),
    Discord { value: f64, branch: Branch },
}

/// One experiment, read from a JSON document; every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub waist: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_discord: Option<f64>,
    pub branch: Branch,
    pub noise: NoiseModel,
    pub frames: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask_radius: Option<f64>,
    pub output_dir: PathBuf,
    pub basis_source: BasisSource,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            waist: DEFAULT_WAIST,
            lambda0: None,
            target_discord: None,
            branch: Branch::Lower,
            noise: NoiseModel::default(),
            frames: 1,
            mask_radius: None,
            output_dir: PathBuf::from("out"),
            basis_source: BasisSource::Measured,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn grid_spec(&self) -> Result<GridSpec<f64>> {
        GridSpec::new(self.grid.n, self.grid.half_extent, self.waist)
    }

    pub fn arm_target(&self) -> Result<ArmTarget> {
        match (self.lambda0, self.target_discord) {
            (Some(_), Some(_)) => Err(Error::InvalidInput(
                "config sets both lambda0 and target_discord".into(),
            )),
            (Some(l0), None) => Ok(ArmTarget::Lambda0(l0)),
            (None, Some(d)) => Ok(ArmTarget::Discord {
                value: d,
                branch: self.branch,
            }),
            (None, None) => Ok(ArmTarget::Lambda0(DEFAULT_LAMBDA0)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid_spec()?;
        self.noise.validate()?;
        match self.arm_target()? {
            ArmTarget::Lambda0(l0) if !(0.0..=1.0).contains(&l0) => {
                return Err(Error::InvalidInput(format!(
                    "lambda0 = {l0} outside [0, 1]"
                )));
            }
            ArmTarget::Discord { value, .. } if !(0.0..=1.0).contains(&value) => {
                return Err(Error::InvalidInput(format!(
                    "target_discord = {value} outside [0, 1]"
                )));
            }
            _ => {}
        }
        if self.frames == 0 {
            return Err(Error::InvalidInput("frames must be >= 1".into()));
        }
        if let Some(r) = self.mask_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "mask_radius = {r} must be > 0"
                )));
            }
        }
        Ok(())
    }

    /// Copy with the arms set directly to `lambda0`.
    pub fn with_lambda0(&self, lambda0: f64) -> Self {
        Self {
            lambda0: Some(lambda0),
            target_discord: None,
            ..self.clone()
        }
    }

    /// Copy with the arms set from a required discord.
    pub fn with_target_discord(&self, d: f64) -> Self {
        Self {
            lambda0: None,
            target_discord: Some(d),
            ..self.clone()
        }
    }
}
