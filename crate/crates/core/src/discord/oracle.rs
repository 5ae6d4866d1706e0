//! Brute-force discord: direct minimization of the post-measurement
//! conditional entropy over projective measurements on qubit B.

use num_complex::Complex;

use super::{bell_density_matrix, BellSpectrum, DiscordValue, TwoQubitDensityMatrix};
use crate::error::{Error, Result};
use crate::scalar::{xlog2x, Real};

/// Smallest θ grid the oracle accepts.
pub const ORACLE_MIN_GRID: usize = 32;

const MIN_OUTCOME_PROBABILITY: f64 = 1e-15;
const ANGULAR_TOL: f64 = 1e-10;
const REFINE_SEEDS: usize = 4;
const MAX_REFINE_PASSES: usize = 30;

/// Bloch-sphere measurement axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementDirection<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> MeasurementDirection<T> {
    pub fn new(theta: T, phi: T) -> Self {
        Self { theta, phi }
    }

    pub fn unit_vector(&self) -> [T; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Π_± = (I ± n̂·σ)/2
    fn projectors(&self) -> [[[Complex<T>; 2]; 2]; 2] {
        let [nx, ny, nz] = self.unit_vector();
        let h = T::half();
        let make = |sign: T| {
            [
                [
                    Complex::new(h * (T::one() + sign * nz), T::zero()),
                    Complex::new(h * sign * nx, -h * sign * ny),
                ],
                [
                    Complex::new(h * sign * nx, h * sign * ny),
                    Complex::new(h * (T::one() - sign * nz), T::zero()),
                ],
            ]
        };
        [make(T::one()), make(-T::one())]
    }
}

type Mat2<T> = [[Complex<T>; 2]; 2];

/// Entropy in bits of a 2×2 Hermitian, unit-trace matrix via its closed-form eigenvalues.
fn entropy2<T: Real>(m: &Mat2<T>) -> T {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let mean = (a + d) * T::half();
    let gap = ((a - d) * T::half()).hypot(m[0][1].norm());
    -(xlog2x(mean + gap) + xlog2x(mean - gap))
}

fn trace_out_a<T: Real>(rho: &TwoQubitDensityMatrix<T>) -> Mat2<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = [[zero; 2]; 2];
    for b in 0..2 {
        for bp in 0..2 {
            for a in 0..2 {
                out[b][bp] += rho.entries[2 * a + b][2 * a + bp];
            }
        }
    }
    out
}

fn trace_out_b<T: Real>(rho: &TwoQubitDensityMatrix<T>) -> Mat2<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = [[zero; 2]; 2];
    for a in 0..2 {
        for ap in 0..2 {
            for b in 0..2 {
                out[a][ap] += rho.entries[2 * a + b][2 * ap + b];
            }
        }
    }
    out
}

/// (I⊗Π) ρ (I⊗Π)
fn sandwich<T: Real>(rho: &TwoQubitDensityMatrix<T>, proj: &Mat2<T>) -> TwoQubitDensityMatrix<T> {
    let mut left = TwoQubitDensityMatrix::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for col in 0..4 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for bb in 0..2 {
                    acc += proj[b][bb] * rho.entries[2 * a + bb][col];
                }
                left.entries[2 * a + b][col] = acc;
            }
        }
    }
    let mut out = TwoQubitDensityMatrix::zeros();
    for row in 0..4 {
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for bb in 0..2 {
                    acc += left.entries[row][2 * a + bb] * proj[bb][b];
                }
                out.entries[row][2 * a + b] = acc;
            }
        }
    }
    out
}

/// Σ_b p_b S(ρ_{A|b}) for a measurement of B along `dir`.
fn conditional_entropy<T: Real>(
    rho: &TwoQubitDensityMatrix<T>,
    dir: &MeasurementDirection<T>,
) -> Result<T> {
    let mut total = T::zero();
    for proj in dir.projectors().iter() {
        let post = sandwich(rho, proj);
        let p = post.trace().re;
        if p.to_f64_lossy() < MIN_OUTCOME_PROBABILITY {
            return Err(Error::DegenerateProbability(p.to_f64_lossy()));
        }
        let mut cond = trace_out_b(&post);
        for row in cond.iter_mut() {
            for e in row.iter_mut() {
                *e /= p;
            }
        }
        total += p * entropy2(&cond);
    }
    Ok(total)
}

fn golden_section<T: Real>(lo: T, hi: T, tol: T, mut f: impl FnMut(T) -> T) -> (T, T) {
    let inv_phi = T::of((5.0_f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    let x = (a + b) * T::half();
    (x, f(x))
}

/// Discord of a Bell-diagonal state from the measurement-based definition,
/// D = S(ρ_B) − S(ρ_AB) + min_n̂ Σ_b p_b S(ρ_{A|b}).
///
/// The minimum is located on a `grid_n × 2·grid_n` (θ, φ) grid, then the best
/// few grid points are polished by alternating golden-section searches on θ
/// and φ. Directions with a vanishing outcome probability are skipped.
pub fn oracle_discord<T: Real>(s: &BellSpectrum<T>, grid_n: usize) -> Result<DiscordValue<T>> {
    if grid_n < ORACLE_MIN_GRID {
        return Err(Error::InvalidInput(format!(
            "oracle grid {grid_n} below minimum {ORACLE_MIN_GRID}"
        )));
    }
    let rho = bell_density_matrix(s);
    let s_b = entropy2(&trace_out_a(&rho));
    let s_ab = s.entropy();

    let n_theta = grid_n;
    let n_phi = 2 * grid_n;
    let d_theta = T::PI() / T::of_usize(n_theta - 1);
    let d_phi = T::TAU() / T::of_usize(n_phi);
    let objective = |theta: T, phi: T| {
        conditional_entropy(&rho, &MeasurementDirection::new(theta, phi)).unwrap_or(T::infinity())
    };

    let mut samples: Vec<(T, T, T)> = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = d_theta * T::of_usize(i);
        for j in 0..n_phi {
            let phi = d_phi * T::of_usize(j);
            let v = objective(theta, phi);
            if v.is_finite() {
                samples.push((v, theta, phi));
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::DegenerateProbability(0.0));
    }
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    let tol = T::of(ANGULAR_TOL);
    let mut best = samples[0].0;
    for &(start, theta0, phi0) in samples.iter().take(REFINE_SEEDS) {
        let (mut theta, mut phi, mut value) = (theta0, phi0, start);
        for _ in 0..MAX_REFINE_PASSES {
            let before = value;
            let lo = (theta - d_theta).max(T::zero());
            let hi = (theta + d_theta).min(T::PI());
            let (t, vt) = golden_section(lo, hi, tol, |t| objective(t, phi));
            if vt < value {
                theta = t;
                value = vt;
            }
            let (p, vp) = golden_section(phi - d_phi, phi + d_phi, tol, |p| objective(theta, p));
            if vp < value {
                phi = p;
                value = vp;
            }
            if before - value <= T::epsilon() {
                break;
            }
        }
        best = best.min(value);
    }
    Ok(DiscordValue::clamped(s_b - s_ab + best))
}
