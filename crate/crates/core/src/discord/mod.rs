//! Bell-diagonal two-qubit states and their quantum discord.
//!
//! The λ ↔ r relations follow the convention
//!
//! ```text
//! λ₀ = (1 − r₁ − r₂ − r₃)/4    λ₁ = (1 − r₁ + r₂ + r₃)/4
//! λ₂ = (1 + r₁ − r₂ + r₃)/4    λ₃ = (1 + r₁ + r₂ − r₃)/4
//! ```
//!
//! with λ₀..λ₃ attached to |ψ⁺⟩, |φ⁺⟩, |ψ⁻⟩, |φ⁻⟩ where
//! |ψ^±⟩ = (|00⟩ ± |11⟩)/√2 and |φ^±⟩ = (|01⟩ ± |10⟩)/√2. This is not the
//! textbook sign assignment of ⟨σᵢ⊗σᵢ⟩, but the discord only depends on the
//! multiset {λᵢ} and on max|rᵢ|, both of which agree under either convention.

mod density;
mod oracle;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{xlog2x, Real};

pub use density::{bell_density_matrix, pauli_correlation_matrix, TwoQubitDensityMatrix};
pub use oracle::{oracle_discord, MeasurementDirection, ORACLE_MIN_GRID};

/// Eigenvalues λ₀..λ₃ of a Bell-diagonal state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellSpectrum<T> {
    lambdas: [T; 4],
}

impl<T: Real> BellSpectrum<T> {
    /// Validates each λᵢ ∈ [0, 1] and Σλᵢ = 1 within the algebraic tolerance.
    pub fn new(lambda0: T, lambda1: T, lambda2: T, lambda3: T) -> Result<Self> {
        Self::from_array([lambda0, lambda1, lambda2, lambda3])
    }

    pub fn from_array(lambdas: [T; 4]) -> Result<Self> {
        let tol = T::algebraic_tol();
        for (i, &l) in lambdas.iter().enumerate() {
            if !l.is_finite() || l < -tol || l > T::one() + tol {
                return Err(Error::InvalidSpectrum(format!(
                    "lambda{i} = {l} outside [0, 1]"
                )));
            }
        }
        let sum: T = lambdas.iter().copied().sum();
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvalidSpectrum(format!("eigenvalues sum to {sum}")));
        }
        Ok(Self { lambdas })
    }

    /// Two-component mixture (λ₀, 1 − λ₀, 0, 0) used by the optical analogue.
    pub fn two_component(lambda0: T) -> Result<Self> {
        Self::new(lambda0, T::one() - lambda0, T::zero(), T::zero())
    }

    pub fn lambdas(&self) -> [T; 4] {
        self.lambdas
    }

    pub fn lambda(&self, i: usize) -> T {
        self.lambdas[i]
    }

    /// Von Neumann entropy of the state in bits, −Σλᵢlog₂λᵢ.
    pub fn entropy(&self) -> T {
        -self.lambdas.iter().map(|&l| xlog2x(l)).sum::<T>()
    }

    /// Same spectrum with the eigenvalues reordered: `perm[i]` is the source index of slot i.
    pub fn permuted(&self, perm: [usize; 4]) -> Self {
        Self {
            lambdas: perm.map(|i| self.lambdas[i]),
        }
    }
}

/// Bloch correlation coefficients (r₁, r₂, r₃).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationVector<T> {
    pub r: [T; 3],
}

impl<T: Real> CorrelationVector<T> {
    pub fn new(r1: T, r2: T, r3: T) -> Result<Self> {
        let tol = T::algebraic_tol();
        for (i, &r) in [r1, r2, r3].iter().enumerate() {
            if !r.is_finite() || r.abs() > T::one() + tol {
                return Err(Error::InvalidInput(format!(
                    "r{} = {r} outside [-1, 1]",
                    i + 1
                )));
            }
        }
        Ok(Self { r: [r1, r2, r3] })
    }

    /// max |rᵢ|
    pub fn max_abs(&self) -> T {
        self.r.iter().fold(T::zero(), |m, &r| m.max(r.abs()))
    }
}

/// Discord in bits, within [0, 1] for two qubits.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct DiscordValue<T>(T);

impl<T: Real> DiscordValue<T> {
    pub fn new(d: T) -> Result<Self> {
        let tol = T::algebraic_tol();
        if !d.is_finite() || d < -tol || d > T::one() + tol {
            return Err(Error::InvalidInput(format!("discord {d} outside [0, 1]")));
        }
        Ok(Self(d.max(T::zero()).min(T::one())))
    }

    pub(crate) fn clamped(d: T) -> Self {
        Self(d.max(T::zero()).min(T::one()))
    }

    pub fn value(self) -> T {
        self.0
    }
}

pub fn correlations_to_spectrum<T: Real>(c: &CorrelationVector<T>) -> Result<BellSpectrum<T>> {
    let [r1, r2, r3] = c.r;
    let q = T::of(0.25);
    let lambdas = [
        (T::one() - r1 - r2 - r3) * q,
        (T::one() - r1 + r2 + r3) * q,
        (T::one() + r1 - r2 + r3) * q,
        (T::one() + r1 + r2 - r3) * q,
    ];
    let min = lambdas.iter().copied().fold(T::infinity(), T::min);
    if min < -T::algebraic_tol() {
        return Err(Error::NonPhysical {
            min_eigenvalue: min.to_f64_lossy(),
        });
    }
    BellSpectrum::from_array(lambdas)
}

pub fn spectrum_to_correlations<T: Real>(s: &BellSpectrum<T>) -> CorrelationVector<T> {
    let [l0, l1, l2, l3] = s.lambdas;
    let two = T::two();
    CorrelationVector {
        r: [
            T::one() - two * (l0 + l1),
            T::one() - two * (l0 + l2),
            T::one() - two * (l0 + l3),
        ],
    }
}

/// Closed-form discord of a Bell-diagonal state.
///
/// D = 2 + Σλᵢlog₂λᵢ − ((1−r)/2)log₂(1−r) − ((1+r)/2)log₂(1+r), r = max|rᵢ|.
pub fn analytic_discord<T: Real>(s: &BellSpectrum<T>) -> DiscordValue<T> {
    let r = spectrum_to_correlations(s).max_abs().min(T::one());
    let mutual_information = T::two() - s.entropy();
    let classical = T::half() * (xlog2x(T::one() - r) + xlog2x(T::one() + r));
    DiscordValue::clamped(mutual_information - classical)
}

/// Which side of λ₀ = ½ to search when inverting D(λ₀, 1 − λ₀, 0, 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// λ₀ ∈ [0, ½], where D decreases with λ₀.
    #[default]
    Lower,
    /// λ₀ ∈ [½, 1], where D increases with λ₀.
    Upper,
}

/// λ₀ such that the two-component state (λ₀, 1 − λ₀, 0, 0) has discord `d`.
pub fn invert_discord<T: Real>(d: DiscordValue<T>, branch: Branch) -> T {
    let target = d.value();
    let (lo_end, hi_end) = match branch {
        Branch::Lower => (T::zero(), T::half()),
        Branch::Upper => (T::half(), T::one()),
    };
    if target <= T::zero() {
        return T::half();
    }
    if target >= T::one() {
        return match branch {
            Branch::Lower => T::zero(),
            Branch::Upper => T::one(),
        };
    }
    let discord_at = |l0: T| {
        let s = BellSpectrum {
            lambdas: [l0, T::one() - l0, T::zero(), T::zero()],
        };
        analytic_discord(&s).value()
    };
    // Orient so that g(a) ≥ target ≥ g(b) and bisect until the bracket stops shrinking.
    let (mut a, mut b) = match branch {
        Branch::Lower => (lo_end, hi_end),
        Branch::Upper => (hi_end, lo_end),
    };
    for _ in 0..200 {
        let mid = (a + b) * T::half();
        if mid == a || mid == b {
            break;
        }
        if discord_at(mid) > target {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (da, db) = (discord_at(a) - target, target - discord_at(b));
    if da <= db {
        a
    } else {
        b
    }
}

/// Spectrum drawn by normalizing four independent uniforms.
pub fn random_spectrum<T: Real, R: Rng + ?Sized>(rng: &mut R) -> BellSpectrum<T> {
    loop {
        let raw: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            continue;
        }
        let Ok(s) = BellSpectrum::from_array(raw.map(|x| T::of(x / total))) else {
            continue;
        };
        if spectrum_to_correlations(&s).max_abs() <= T::one() + T::algebraic_tol() {
            return s;
        }
    }
}
