//! One end-to-end pass: required discord → arm settings → captures →
//! recovered weights → measured discord.

use serde::{Deserialize, Serialize};

use super::config::{ArmTarget, BasisSource, ExperimentConfig};
use crate::bench::{
    block_arm, build_combined_state, ccd_capture, expected_profile, normalize_frames,
    normalize_image, trace_out_polarization, translate_bilinear, Arm, ArmSettings, CCDImage,
    NoiseModel,
};
use crate::discord::{analytic_discord, invert_discord, BellSpectrum, DiscordValue};
use crate::error::{Error, Result};
use crate::fields::{bell_modes, intensity, BellModes, GridSpec, IntensityMap};
use crate::recovery::{recover_fraction, RecoveryResult};

pub const EXPOSURE_BASIS_PSI: u64 = 0;
pub const EXPOSURE_BASIS_PHI: u64 = 1;
pub const EXPOSURE_FIRST_FRAME: u64 = 2;

/// Summary of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub required_discord: f64,
    pub lambda0_set: f64,
    pub lambda0_rec: f64,
    pub discord_measured: f64,
    pub residual: f64,
    pub saturation_fraction: f64,
    pub seed: u64,
}

/// Grid and Bell-mode fields shared by every run with the same geometry.
#[derive(Clone, Debug)]
pub struct Bench {
    pub grid: GridSpec<f64>,
    pub modes: BellModes<f64>,
    pub psi_intensity: IntensityMap<f64>,
    pub phi_intensity: IntensityMap<f64>,
}

impl Bench {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        let grid = config.grid_spec()?;
        let modes = bell_modes(&grid)?;
        let psi_intensity = block_arm(&modes.psi_plus, &modes.phi_plus, Arm::Phi);
        let phi_intensity = block_arm(&modes.psi_plus, &modes.phi_plus, Arm::Psi);
        Ok(Self {
            grid,
            modes,
            psi_intensity,
            phi_intensity,
        })
    }

    pub fn matches(&self, config: &ExperimentConfig) -> bool {
        config.grid_spec().map(|g| g == self.grid).unwrap_or(false)
    }

    /// Blocked-arm captures, the ψ⁺ arm aligned and the φ⁺ arm displaced.
    pub fn capture_bases(&self, noise: &NoiseModel) -> Result<(CCDImage<f64>, CCDImage<f64>)> {
        let psi = ccd_capture(
            &self.psi_intensity,
            &noise.without_misalignment(),
            EXPOSURE_BASIS_PSI,
        )?;
        let phi = ccd_capture(&self.phi_intensity, noise, EXPOSURE_BASIS_PHI)?;
        Ok((psi, phi))
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub recovery: RecoveryResult<f64>,
    pub basis_psi: CCDImage<f64>,
    pub basis_phi: CCDImage<f64>,
    pub frames: Vec<CCDImage<f64>>,
    pub measured: IntensityMap<f64>,
    pub expected: IntensityMap<f64>,
    pub recovered: IntensityMap<f64>,
}

/// λ₀ the attenuators are set to, and the discord that choice is meant to realize.
pub fn resolve_arms(target: ArmTarget) -> Result<(f64, f64)> {
    match target {
        ArmTarget::Lambda0(l0) => {
            let d = analytic_discord(&BellSpectrum::two_component(l0)?).value();
            Ok((l0, d))
        }
        ArmTarget::Discord { value, branch } => {
            let l0 = invert_discord(DiscordValue::new(value)?, branch);
            Ok((l0, value))
        }
    }
}

fn prepare(map: &IntensityMap<f64>, mask: Option<f64>) -> Result<IntensityMap<f64>> {
    let shaped = match mask {
        Some(r) => map.masked(r),
        None => map.clone(),
    };
    shaped.normalized().ok_or(Error::EmptyImage)
}

pub fn run_experiment(config: &ExperimentConfig, bench: &Bench) -> Result<RunOutcome> {
    config.validate()?;
    if !bench.matches(config) {
        return Err(Error::GridMismatch);
    }
    let noise = &config.noise;
    let (lambda0_set, required_discord) = resolve_arms(config.arm_target()?)?;

    let (basis_psi, basis_phi) = bench.capture_bases(noise)?;

    let arms = ArmSettings::from_lambda0(lambda0_set)?;
    let combined = build_combined_state(&bench.modes.psi_plus, &bench.modes.phi_plus, &arms)?;
    let on_sensor = if noise.has_misalignment() {
        let h = intensity(&combined.e_h);
        let v = translate_bilinear(
            &intensity(&combined.e_v),
            noise.misalign_dx,
            noise.misalign_dy,
        );
        let samples = h
            .samples()
            .iter()
            .zip(v.samples())
            .map(|(a, b)| a + b)
            .collect();
        IntensityMap::from_samples(bench.grid, samples)?
    } else {
        trace_out_polarization(&combined)
    };
    let frame_noise = noise.without_misalignment();
    let frames = (0..config.frames as u64)
        .map(|k| ccd_capture(&on_sensor, &frame_noise, EXPOSURE_FIRST_FRAME + k))
        .collect::<Result<Vec<_>>>()?;

    let (psi_ref, phi_ref) = match config.basis_source {
        BasisSource::Measured => (normalize_image(&basis_psi)?, normalize_image(&basis_phi)?),
        BasisSource::Analytic => (bench.psi_intensity.clone(), bench.phi_intensity.clone()),
    };
    let measured_raw = normalize_frames(&frames)?;
    let (measured, psi_ref, phi_ref) =
        if config.mask_radius.is_some() || config.basis_source == BasisSource::Analytic {
            (
                prepare(&measured_raw, config.mask_radius)?,
                prepare(&psi_ref, config.mask_radius)?,
                prepare(&phi_ref, config.mask_radius)?,
            )
        } else {
            (measured_raw, psi_ref, phi_ref)
        };

    let recovery = recover_fraction(&measured, &psi_ref, &phi_ref)?;
    let expected = expected_profile(&psi_ref, &phi_ref, lambda0_set)?;
    let recovered = expected_profile(&psi_ref, &phi_ref, recovery.lambda0_rec)?;

    let saturation_fraction = frames
        .iter()
        .chain([&basis_psi, &basis_phi])
        .map(|f| f.metadata.saturation_fraction)
        .fold(0.0, f64::max);
    let record = RunRecord {
        required_discord,
        lambda0_set,
        lambda0_rec: recovery.lambda0_rec,
        discord_measured: recovery.discord_measured.value(),
        residual: recovery.residual,
        saturation_fraction,
        seed: noise.seed,
    };
    Ok(RunOutcome {
        record,
        recovery,
        basis_psi,
        basis_phi,
        frames,
        measured,
        expected,
        recovered,
    })
}
