//! Classical optical analogue of Bell-diagonal quantum discord.
//!
//! The crate is organized bottom-up:
//!
//! * [`discord`]: Bell-diagonal spectra, correlation coefficients, the
//!   closed-form discord and a brute-force measurement oracle.
//! * [`fields`]: Laguerre-Gauss modes and the |ψ⁺), |φ⁺) superpositions on a grid.
//! * [`bench`]: the two-arm interferometer, polarization trace and CCD model.
//! * [`recovery`]: least-squares recovery of mixture weights from images.
//! * [`pipeline`]: configuration, file formats and the end-to-end commands.
//!
//! The numerical modules are generic over [`Real`]; the aliases below fix
//! the scalar to `f64`, which is what the pipeline uses.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bench;
pub mod discord;
pub mod error;
pub mod fields;
pub mod pipeline;
pub mod recovery;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub use discord::{
    analytic_discord, bell_density_matrix, correlations_to_spectrum, invert_discord,
    oracle_discord, spectrum_to_correlations, Branch,
};
pub use fields::{bell_modes, inner_product, intensity, lg_mode, superpose, ModeIndex};

pub type BellSpectrum = discord::BellSpectrum<f64>;
pub type CorrelationVector = discord::CorrelationVector<f64>;
pub type DiscordValue = discord::DiscordValue<f64>;
pub type TwoQubitDensityMatrix = discord::TwoQubitDensityMatrix<f64>;
pub type MeasurementDirection = discord::MeasurementDirection<f64>;
pub type GridSpec = fields::GridSpec<f64>;
pub type ScalarField = fields::ScalarField<f64>;
pub type IntensityMap = fields::IntensityMap<f64>;
pub type PolarizedField = bench::PolarizedField<f64>;
pub type RecoveryResult = recovery::RecoveryResult<f64>;

/// Single-precision variants.
pub mod f32 {
    pub type BellSpectrum = crate::discord::BellSpectrum<f32>;
    pub type DiscordValue = crate::discord::DiscordValue<f32>;
    pub type GridSpec = crate::fields::GridSpec<f32>;
    pub type ScalarField = crate::fields::ScalarField<f32>;
    pub type IntensityMap = crate::fields::IntensityMap<f32>;
}
