//! Recovery of mixture weights from detector images.
//!
//! The two-beam problem minimizes ∫[M − x·I_ψ − (1−x)·I_φ]² over x ∈ [0, 1].
//! It is quadratic in x, so the minimizer is the unconstrained stationary
//! point clamped to the interval.

use crate::discord::{analytic_discord, BellSpectrum, DiscordValue};
use crate::error::{Error, Result};
use crate::fields::IntensityMap;
use crate::scalar::Real;

/// Below this separation Σ(I_ψ − I_φ)²ΔA the mixture weight is unidentifiable.
pub const DEGENERATE_SEPARATION: f64 = 1e-9;

const NORMALIZATION_TOL: f64 = 1e-2;
const SIMPLEX_OBJECTIVE_TOL: f64 = 1e-12;
const SIMPLEX_MAX_ITER: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryResult<T> {
    pub lambda0_rec: T,
    pub lambda1_rec: T,
    /// Objective at the optimum, in intensity² × area.
    pub residual: T,
    pub discord_measured: DiscordValue<T>,
}

fn check_normalized<T: Real>(name: &str, m: &IntensityMap<T>) -> Result<()> {
    let total = m.integral().to_f64_lossy();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidInput(format!(
            "{name} image integrates to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Closed-form solution of the constrained two-beam least-squares problem.
pub fn recover_fraction<T: Real>(
    measured: &IntensityMap<T>,
    basis_psi: &IntensityMap<T>,
    basis_phi: &IntensityMap<T>,
) -> Result<RecoveryResult<T>> {
    measured.grid().check_same(basis_psi.grid())?;
    measured.grid().check_same(basis_phi.grid())?;
    check_normalized("measured", measured)?;
    check_normalized("psi basis", basis_psi)?;
    check_normalized("phi basis", basis_phi)?;

    let area = measured.grid().cell_area();
    let mut cross = T::zero();
    let mut separation = T::zero();
    for ((&m, &p), &q) in measured
        .samples()
        .iter()
        .zip(basis_psi.samples())
        .zip(basis_phi.samples())
    {
        let d = p - q;
        cross += (m - q) * d;
        separation += d * d;
    }
    let (cross, separation) = (cross * area, separation * area);
    if separation.to_f64_lossy() < DEGENERATE_SEPARATION {
        return Err(Error::DegenerateBasis {
            separation: separation.to_f64_lossy(),
        });
    }
    let x = (cross / separation).max(T::zero()).min(T::one());
    let y = T::one() - x;
    let residual = measured
        .samples()
        .iter()
        .zip(basis_psi.samples())
        .zip(basis_phi.samples())
        .map(|((&m, &p), &q)| {
            let r = m - x * p - y * q;
            r * r
        })
        .sum::<T>()
        * area;
    let spectrum = BellSpectrum::new(x, y, T::zero(), T::zero())?;
    Ok(RecoveryResult {
        lambda0_rec: x,
        lambda1_rec: y,
        residual,
        discord_measured: analytic_discord(&spectrum),
    })
}

/// Weights on the probability simplex minimizing ‖M − Σwᵢ·Bᵢ‖².
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexRecovery<T> {
    pub weights: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    /// The differences {Bᵢ − B_N} were linearly dependent; weights are best effort.
    pub degenerate: bool,
}

/// Euclidean projection onto {w ≥ 0, Σw = 1} by the sort-and-threshold rule.
pub fn project_to_simplex<T: Real>(v: &[T]) -> Vec<T> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumulative = T::zero();
    let mut threshold = T::zero();
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - T::one()) / T::of_usize(k + 1);
        if u - t > T::zero() {
            threshold = t;
        }
    }
    let mut w: Vec<T> = v.iter().map(|&x| (x - threshold).max(T::zero())).collect();
    // Pin the sum to one by absorbing rounding into the largest weight.
    let largest = (0..w.len())
        .max_by(|&a, &b| w[a].partial_cmp(&w[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let others: T = w
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != largest)
        .map(|(_, &x)| x)
        .sum();
    if let Some(slot) = w.get_mut(largest) {
        *slot = (T::one() - others).max(T::zero());
    }
    w
}

fn is_singular<T: Real>(mut h: Vec<Vec<T>>) -> bool {
    let k = h.len();
    let tol = T::of(DEGENERATE_SEPARATION);
    for j in 0..k {
        let mut pivot = h[j][j];
        for p in 0..j {
            pivot -= h[j][p] * h[j][p];
        }
        if pivot < tol {
            return true;
        }
        let root = pivot.sqrt();
        h[j][j] = root;
        for i in (j + 1)..k {
            let mut s = h[i][j];
            for p in 0..j {
                s -= h[i][p] * h[j][p];
            }
            h[i][j] = s / root;
        }
    }
    false
}

/// Projected gradient descent on the simplex-constrained least-squares
/// problem over any number of basis images.
pub fn recover_simplex<T: Real>(
    measured: &IntensityMap<T>,
    bases: &[IntensityMap<T>],
) -> Result<SimplexRecovery<T>> {
    if bases.len() < 2 {
        return Err(Error::InvalidInput(
            "simplex recovery needs at least two bases".into(),
        ));
    }
    for b in bases {
        measured.grid().check_same(b.grid())?;
    }
    let k = bases.len();
    let area = measured.grid().cell_area();
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>() * area;

    let gram: Vec<Vec<T>> = bases
        .iter()
        .map(|bi| {
            bases
                .iter()
                .map(|bj| dot(bi.samples(), bj.samples()))
                .collect()
        })
        .collect();
    let rhs: Vec<T> = bases
        .iter()
        .map(|b| dot(b.samples(), measured.samples()))
        .collect();
    let constant = dot(measured.samples(), measured.samples());

    let last = k - 1;
    let reduced: Vec<Vec<T>> = (0..last)
        .map(|i| {
            (0..last)
                .map(|j| gram[i][j] - gram[i][last] - gram[j][last] + gram[last][last])
                .collect()
        })
        .collect();
    let degenerate = is_singular(reduced);

    let objective = |w: &[T]| {
        let mut f = constant;
        for i in 0..k {
            f -= T::two() * rhs[i] * w[i];
            for j in 0..k {
                f += w[i] * gram[i][j] * w[j];
            }
        }
        f
    };
    // Gershgorin bound on the largest Gram eigenvalue gives a safe step.
    let lipschitz = T::two()
        * gram
            .iter()
            .map(|row| row.iter().map(|g| g.abs()).sum::<T>())
            .fold(T::zero(), T::max);
    if !(lipschitz > T::zero()) {
        return Err(Error::DegenerateBasis { separation: 0.0 });
    }
    let step = T::one() / lipschitz;

    let mut w = vec![T::one() / T::of_usize(k); k];
    let mut f = objective(&w);
    let mut iterations = 0;
    let tol = T::of(SIMPLEX_OBJECTIVE_TOL);
    while iterations < SIMPLEX_MAX_ITER {
        iterations += 1;
        let trial: Vec<T> = (0..k)
            .map(|i| {
                let g: T = (0..k).map(|j| gram[i][j] * w[j]).sum::<T>() - rhs[i];
                w[i] - step * T::two() * g
            })
            .collect();
        let next = project_to_simplex(&trial);
        let f_next = objective(&next);
        let change = (f - f_next).abs();
        let moved = next
            .iter()
            .zip(&w)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
        w = next;
        f = f_next;
        // The objective is flat near the optimum, so the iterate must settle too.
        if change < tol && moved < tol {
            break;
        }
    }
    Ok(SimplexRecovery {
        weights: w,
        objective: f.max(T::zero()),
        iterations,
        degenerate,
    })
}

/// Outcome of the exhaustive search over x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSearch<T> {
    pub x: T,
    pub objective_min: T,
    pub objective_max: T,
}

/// Evaluates the two-beam objective at `steps` evenly spaced x ∈ [0, 1] and
/// returns the best point. Reference for testing [`recover_fraction`].
pub fn brute_force_fraction<T: Real>(
    measured: &IntensityMap<T>,
    basis_psi: &IntensityMap<T>,
    basis_phi: &IntensityMap<T>,
    steps: usize,
) -> Result<GridSearch<T>> {
    if steps < 1000 {
        return Err(Error::InvalidInput(format!(
            "grid search needs >= 1000 steps, got {steps}"
        )));
    }
    measured.grid().check_same(basis_psi.grid())?;
    measured.grid().check_same(basis_phi.grid())?;
    let area = measured.grid().cell_area();
    // Objective(x) = ∫(u − x·d)² = a − 2bx + cx² with u = M − I_φ and d = I_ψ − I_φ.
    let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
    for ((&m, &p), &q) in measured
        .samples()
        .iter()
        .zip(basis_psi.samples())
        .zip(basis_phi.samples())
    {
        let u = m - q;
        let d = p - q;
        a += u * u;
        b += u * d;
        c += d * d;
    }
    let (a, b, c) = (a * area, b * area, c * area);
    let mut best = GridSearch {
        x: T::zero(),
        objective_min: T::infinity(),
        objective_max: T::neg_infinity(),
    };
    let last = T::of_usize(steps - 1);
    for k in 0..steps {
        let x = T::of_usize(k) / last;
        let value = a - T::two() * b * x + c * x * x;
        if value < best.objective_min {
            best.objective_min = value;
            best.x = x;
        }
        best.objective_max = best.objective_max.max(value);
    }
    Ok(best)
}
