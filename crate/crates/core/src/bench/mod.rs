//! Two-arm interferometer: per-arm attenuation, polarization tagging,
//! recombination and the polarization-blind detector.

mod ccd;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fields::{intensity, IntensityMap, ScalarField};
use crate::scalar::Real;

pub use ccd::{
    ccd_capture, normalize_frames, normalize_image, translate_bilinear, CCDImage, CaptureMetadata,
    NoiseModel,
};

/// Field with horizontal and vertical polarization components.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizedField<T> {
    pub e_h: ScalarField<T>,
    pub e_v: ScalarField<T>,
}

impl<T: Real> PolarizedField<T> {
    pub fn new(e_h: ScalarField<T>, e_v: ScalarField<T>) -> Result<Self> {
        e_h.grid().check_same(e_v.grid())?;
        Ok(Self { e_h, e_v })
    }

    /// Σ(|e_h|² + |e_v|²)ΔA
    pub fn power(&self) -> T {
        self.e_h.norm_sqr() + self.e_v.norm_sqr()
    }

    /// Rotates the polarization basis by `alpha` (a lossless wave plate).
    pub fn rotated(&self, alpha: T) -> Self {
        let (s, c) = alpha.sin_cos();
        let mix = |a: &ScalarField<T>, ca: T, b: &ScalarField<T>, cb: T| {
            let samples = a
                .samples()
                .iter()
                .zip(b.samples().iter())
                .map(|(&x, &y)| x * ca + y * cb)
                .collect();
            ScalarField::from_samples(*a.grid(), samples).expect("same grid, finite samples")
        };
        Self {
            e_h: mix(&self.e_h, c, &self.e_v, -s),
            e_v: mix(&self.e_h, s, &self.e_v, c),
        }
    }
}

/// Intensities set by the variable attenuators in the ψ⁺ arm (`i0`) and φ⁺ arm (`i1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArmSettings<T> {
    pub i0: T,
    pub i1: T,
}

impl<T: Real> ArmSettings<T> {
    pub fn new(i0: T, i1: T) -> Result<Self> {
        if !(i0.is_finite() && i1.is_finite() && i0 >= T::zero() && i1 >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "arm intensities ({i0}, {i1}) must be >= 0"
            )));
        }
        if i0 + i1 <= T::zero() {
            return Err(Error::ZeroPower);
        }
        Ok(Self { i0, i1 })
    }

    /// Arms realizing λ₀ for the ψ⁺ beam.
    pub fn from_lambda0(lambda0: T) -> Result<Self> {
        if !(T::zero()..=T::one()).contains(&lambda0) {
            return Err(Error::InvalidInput(format!(
                "lambda0 = {lambda0} outside [0, 1]"
            )));
        }
        Self::new(lambda0, T::one() - lambda0)
    }

    /// Optical eigenvalues (λ₀, λ₁) = (I₀, I₁)/(I₀ + I₁).
    pub fn lambdas(&self) -> (T, T) {
        let total = self.i0 + self.i1;
        (self.i0 / total, self.i1 / total)
    }
}

/// Which interferometer arm to block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arm {
    Psi,
    Phi,
}

/// |E) = √λ₀|ψ⁺)|H) + √λ₁|φ⁺)|V)
pub fn build_combined_state<T: Real>(
    psi: &ScalarField<T>,
    phi: &ScalarField<T>,
    arms: &ArmSettings<T>,
) -> Result<PolarizedField<T>> {
    if arms.i0 + arms.i1 <= T::zero() {
        return Err(Error::ZeroPower);
    }
    psi.grid().check_same(phi.grid())?;
    let (l0, l1) = arms.lambdas();
    let z = T::zero();
    PolarizedField::new(
        psi.scale(Complex::new(l0.sqrt(), z)),
        phi.scale(Complex::new(l1.sqrt(), z)),
    )
}

/// Polarization-blind detection: pointwise |e_h|² + |e_v|².
pub fn trace_out_polarization<T: Real>(e: &PolarizedField<T>) -> IntensityMap<T> {
    let samples = e
        .e_h
        .samples()
        .iter()
        .zip(e.e_v.samples().iter())
        .map(|(h, v)| h.norm_sqr() + v.norm_sqr())
        .collect();
    IntensityMap::from_raw(*e.e_h.grid(), samples)
}

/// λ₀·I_ψ + (1 − λ₀)·I_φ
pub fn expected_profile<T: Real>(
    i_psi: &IntensityMap<T>,
    i_phi: &IntensityMap<T>,
    lambda0: T,
) -> Result<IntensityMap<T>> {
    i_psi.grid().check_same(i_phi.grid())?;
    if !(T::zero()..=T::one()).contains(&lambda0) {
        return Err(Error::InvalidInput(format!(
            "lambda0 = {lambda0} outside [0, 1]"
        )));
    }
    let l1 = T::one() - lambda0;
    let samples = i_psi
        .samples()
        .iter()
        .zip(i_phi.samples().iter())
        .map(|(&a, &b)| lambda0 * a + l1 * b)
        .collect();
    Ok(IntensityMap::from_raw(*i_psi.grid(), samples))
}

/// Intensity reaching the detector with `blocked` obstructed.
pub fn block_arm<T: Real>(
    psi: &ScalarField<T>,
    phi: &ScalarField<T>,
    blocked: Arm,
) -> IntensityMap<T> {
    match blocked {
        Arm::Phi => intensity(psi),
        Arm::Psi => intensity(phi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{bell_modes, BellModes, GridSpec};

    fn modes() -> BellModes<f64> {
        bell_modes(&GridSpec::new(64, 4.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn single_arm_passes_psi_only() {
        let m = modes();
        let e = build_combined_state(
            &m.psi_plus,
            &m.phi_plus,
            &ArmSettings::new(1.0, 0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(e.e_h, m.psi_plus);
        assert!(e.e_v.samples().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn component_powers_follow_arm_ratio() {
        let m = modes();
        for (i0, i1, p0) in [(1.0, 1.0, 0.5), (0.17, 0.83, 0.17), (3.0, 1.0, 0.75)] {
            let e =
                build_combined_state(&m.psi_plus, &m.phi_plus, &ArmSettings::new(i0, i1).unwrap())
                    .unwrap();
            assert!((e.e_h.norm_sqr() - p0).abs() < 1e-3);
            assert!((e.e_v.norm_sqr() - (1.0 - p0)).abs() < 1e-3);
            assert!((e.power() - 1.0).abs() < 2e-3);
        }
    }

    #[test]
    fn zero_power_is_rejected() {
        assert!(matches!(ArmSettings::new(0.0, 0.0), Err(Error::ZeroPower)));
        assert!(ArmSettings::new(-1.0, 2.0).is_err());
        let m = modes();
        let arms = ArmSettings { i0: 0.0, i1: 0.0 };
        assert!(matches!(
            build_combined_state(&m.psi_plus, &m.phi_plus, &arms),
            Err(Error::ZeroPower)
        ));
    }

    #[test]
    fn trace_matches_weighted_profile() {
        let m = modes();
        let (ip, iq) = (intensity(&m.psi_plus), intensity(&m.phi_plus));
        for l0 in [0.0, 0.17, 0.38, 0.5, 0.64, 1.0] {
            let e = build_combined_state(
                &m.psi_plus,
                &m.phi_plus,
                &ArmSettings::from_lambda0(l0).unwrap(),
            )
            .unwrap();
            let traced = trace_out_polarization(&e);
            assert!(traced.max_abs_diff(&expected_profile(&ip, &iq, l0).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn trace_of_horizontal_only_is_its_intensity() {
        let m = modes();
        let e = PolarizedField::new(m.phi_plus.clone(), ScalarField::zeros(*m.phi_plus.grid()))
            .unwrap();
        assert_eq!(trace_out_polarization(&e), intensity(&m.phi_plus));
    }

    #[test]
    fn polarization_rotation_preserves_power() {
        let m = modes();
        let e = build_combined_state(
            &m.psi_plus,
            &m.phi_plus,
            &ArmSettings::new(0.3, 0.7).unwrap(),
        )
        .unwrap();
        let r = e.rotated(0.4);
        assert!((r.power() - e.power()).abs() < 1e-12);
        // The traced map is invariant: the two components are recombined incoherently.
        assert!(trace_out_polarization(&r).max_abs_diff(&trace_out_polarization(&e)) < 1e-12);
        // Each component, however, changes.
        assert!(intensity(&r.e_h).max_abs_diff(&intensity(&e.e_h)) > 1e-3);
    }

    #[test]
    fn expected_profile_endpoints() {
        let m = modes();
        let (ip, iq) = (intensity(&m.psi_plus), intensity(&m.phi_plus));
        assert_eq!(expected_profile(&ip, &iq, 1.0).unwrap(), ip);
        let avg = expected_profile(&ip, &iq, 0.5).unwrap();
        for k in 0..ip.samples().len() {
            assert!((avg.samples()[k] - 0.5 * (ip.samples()[k] + iq.samples()[k])).abs() < 1e-15);
        }
        let other = IntensityMap::zeros(GridSpec::new(32, 4.0, 1.0).unwrap());
        assert!(matches!(
            expected_profile(&ip, &other, 0.5),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn blocking_selects_the_open_arm() {
        let m = modes();
        let open_psi = block_arm(&m.psi_plus, &m.phi_plus, Arm::Phi);
        let open_phi = block_arm(&m.psi_plus, &m.phi_plus, Arm::Psi);
        assert_eq!(open_psi, intensity(&m.psi_plus));
        assert_eq!(open_phi, intensity(&m.phi_plus));
        assert!((open_psi.integral() - 1.0).abs() < 1e-3);
        assert!((open_phi.integral() - 1.0).abs() < 1e-3);
    }
}
