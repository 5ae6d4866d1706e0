use num_complex::Complex;

use super::{BellSpectrum, CorrelationVector};
use crate::scalar::Real;

/// 4×4 density matrix in the computational basis |00⟩, |01⟩, |10⟩, |11⟩.
///
/// Index `2a + b` addresses qubit A in state `a` and qubit B in state `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitDensityMatrix<T> {
    pub entries: [[Complex<T>; 4]; 4],
}

impl<T: Real> TwoQubitDensityMatrix<T> {
    pub fn zeros() -> Self {
        Self {
            entries: [[Complex::new(T::zero(), T::zero()); 4]; 4],
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..4)
            .map(|i| self.entries[i][i])
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        (0..4)
            .all(|i| (0..4).all(|j| (self.entries[i][j] - self.entries[j][i].conj()).norm() <= tol))
    }

    /// `ρ·v`
    pub fn apply(&self, v: &[Complex<T>; 4]) -> [Complex<T>; 4] {
        std::array::from_fn(|i| {
            (0..4).fold(Complex::new(T::zero(), T::zero()), |acc, j| {
                acc + self.entries[i][j] * v[j]
            })
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        m
    }

    fn add_projector(&mut self, weight: T, v: &[Complex<T>; 4]) {
        for i in 0..4 {
            for j in 0..4 {
                self.entries[i][j] += v[i] * v[j].conj() * weight;
            }
        }
    }
}

/// The Bell states |ψ⁺⟩, |φ⁺⟩, |ψ⁻⟩, |φ⁻⟩ in eigenvalue order λ₀..λ₃.
pub fn bell_basis<T: Real>() -> [[Complex<T>; 4]; 4] {
    let h = T::FRAC_1_SQRT_2();
    let z = T::zero();
    let c = |x: T| Complex::new(x, z);
    [
        [c(h), c(z), c(z), c(h)],
        [c(z), c(h), c(h), c(z)],
        [c(h), c(z), c(z), c(-h)],
        [c(z), c(h), c(-h), c(z)],
    ]
}

/// ρ = λ₀|ψ⁺⟩⟨ψ⁺| + λ₁|φ⁺⟩⟨φ⁺| + λ₂|ψ⁻⟩⟨ψ⁻| + λ₃|φ⁻⟩⟨φ⁻|
pub fn bell_density_matrix<T: Real>(s: &BellSpectrum<T>) -> TwoQubitDensityMatrix<T> {
    let mut rho = TwoQubitDensityMatrix::zeros();
    for (lambda, v) in s.lambdas().into_iter().zip(bell_basis::<T>().iter()) {
        rho.add_projector(lambda, v);
    }
    rho
}

/// ¼(I + Σᵢ rᵢ σᵢ⊗σᵢ)
///
/// With correlations from [`super::spectrum_to_correlations`] this places
/// λ₂ on |ψ⁺⟩, λ₃ on |φ⁺⟩, λ₁ on |ψ⁻⟩ and λ₀ on |φ⁻⟩, a relabeling of
/// [`bell_density_matrix`] that leaves entropies and discord unchanged.
pub fn pauli_correlation_matrix<T: Real>(c: &CorrelationVector<T>) -> TwoQubitDensityMatrix<T> {
    let z = T::zero();
    let one = Complex::new(T::one(), z);
    let i = Complex::new(z, T::one());
    let zero = Complex::new(z, z);
    let paulis = [
        [[zero, one], [one, zero]],
        [[zero, -i], [i, zero]],
        [[one, zero], [zero, -one]],
    ];
    let mut rho = TwoQubitDensityMatrix::zeros();
    let q = T::of(0.25);
    for k in 0..4 {
        rho.entries[k][k] = Complex::new(q, z);
    }
    for (sigma, &r) in paulis.iter().zip(c.r.iter()) {
        for a in 0..2 {
            for b in 0..2 {
                for ap in 0..2 {
                    for bp in 0..2 {
                        rho.entries[2 * a + b][2 * ap + bp] +=
                            sigma[a][ap] * sigma[b][bp] * (r * q);
                    }
                }
            }
        }
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discord::{random_spectrum, spectrum_to_correlations};

    #[test]
    fn pure_psi_plus_entries() {
        let rho = bell_density_matrix(&BellSpectrum::<f64>::new(1.0, 0.0, 0.0, 0.0).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i == 0 || i == 3) && (j == 0 || j == 3) {
                    0.5
                } else {
                    0.0
                };
                assert!((rho.entries[i][j].re - expected).abs() < 1e-15);
                assert_eq!(rho.entries[i][j].im, 0.0);
            }
        }
    }

    #[test]
    fn maximally_mixed_is_identity_over_four() {
        let rho = bell_density_matrix(&BellSpectrum::new(0.25, 0.25, 0.25, 0.25).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 0.25 } else { 0.0 };
                assert!((rho.entries[i][j] - Complex::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bell_states_are_eigenvectors_with_spectrum_eigenvalues() {
        let mut rng = rand::rng();
        for _ in 0..100 {
            let s: BellSpectrum<f64> = random_spectrum(&mut rng);
            let rho = bell_density_matrix(&s);
            assert!(rho.is_hermitian(1e-12));
            assert!((rho.trace() - Complex::new(1.0, 0.0)).norm() < 1e-12);
            for (k, v) in bell_basis::<f64>().iter().enumerate() {
                let av = rho.apply(v);
                for c in 0..4 {
                    assert!((av[c] - v[c] * s.lambda(k)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pauli_form_is_a_relabeled_bell_mixture() {
        let mut rng = rand::rng();
        for _ in 0..100 {
            let s: BellSpectrum<f64> = random_spectrum(&mut rng);
            let pauli = pauli_correlation_matrix(&spectrum_to_correlations(&s));
            let relabeled = bell_density_matrix(&s.permuted([2, 3, 1, 0]));
            assert!(pauli.max_abs_diff(&relabeled) < 1e-12);
        }
        // The two constructions differ for a generic spectrum.
        let s = BellSpectrum::new(0.4, 0.3, 0.2, 0.1).unwrap();
        let pauli = pauli_correlation_matrix(&spectrum_to_correlations(&s));
        assert!(pauli.max_abs_diff(&bell_density_matrix(&s)) > 0.01);
    }
}
