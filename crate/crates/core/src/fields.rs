//! Laguerre-Gauss modes sampled on a square grid in the waist plane.
//!
//! Pixel `(ix, iy)` is stored at `iy * n + ix` and centered at
//! `((ix + ½ − n/2)Δ, (iy + ½ − n/2)Δ)`; the azimuth is measured from +x,
//! counterclockwise.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_GRID_N: usize = 512;
pub const DEFAULT_HALF_EXTENT: f64 = 4.0;
pub const DEFAULT_WAIST: f64 = 1.0;

/// Largest tolerated deviation of a discrete mode norm from 1.
pub const NORM_TOL: f64 = 1e-3;

const MIN_GRID_N: usize = 16;
const MIN_HALF_EXTENT: f64 = 3.0;

/// Square sampling grid; `half_extent` is in units of the waist.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T> {
    n: usize,
    half_extent: T,
    waist: T,
}

impl<T: Real> GridSpec<T> {
    pub fn new(n: usize, half_extent: T, waist: T) -> Result<Self> {
        if n < MIN_GRID_N {
            return Err(Error::InvalidGrid(format!("n = {n} below {MIN_GRID_N}")));
        }
        if !(half_extent.to_f64_lossy() >= MIN_HALF_EXTENT) {
            return Err(Error::InvalidGrid(format!(
                "half_extent = {half_extent} below {MIN_HALF_EXTENT}"
            )));
        }
        if !(waist > T::zero()) || !waist.is_finite() {
            return Err(Error::InvalidGrid(format!("waist = {waist} not positive")));
        }
        Ok(Self {
            n,
            half_extent,
            waist,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_extent(&self) -> T {
        self.half_extent
    }

    pub fn waist(&self) -> T {
        self.waist
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Pixel pitch Δ = 2·half_extent·w/n.
    pub fn pitch(&self) -> T {
        T::two() * self.half_extent * self.waist / T::of_usize(self.n)
    }

    pub fn cell_area(&self) -> T {
        let d = self.pitch();
        d * d
    }

    /// Physical coordinate of pixel center `i` along either axis.
    pub fn coordinate(&self, i: usize) -> T {
        (T::of_usize(i) + T::half() - T::of_usize(self.n) * T::half()) * self.pitch()
    }

    /// Pixel centers in storage order.
    pub fn points(&self) -> impl Iterator<Item = (T, T)> + '_ {
        (0..self.n).flat_map(move |iy| {
            let y = self.coordinate(iy);
            (0..self.n).map(move |ix| (self.coordinate(ix), y))
        })
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

impl Default for GridSpec<f64> {
    fn default() -> Self {
        Self {
            n: DEFAULT_GRID_N,
            half_extent: DEFAULT_HALF_EXTENT,
            waist: DEFAULT_WAIST,
        }
    }
}

/// Radial index `p` and azimuthal index `ell` of an LG mode, both in {0, 1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    p: u32,
    ell: i32,
}

impl ModeIndex {
    pub const LG00: Self = Self { p: 0, ell: 0 };
    pub const LG01: Self = Self { p: 0, ell: 1 };
    pub const LG10: Self = Self { p: 1, ell: 0 };
    pub const LG11: Self = Self { p: 1, ell: 1 };

    /// The four modes spanning the two-qubit analogue.
    pub const ALL: [Self; 4] = [Self::LG00, Self::LG01, Self::LG10, Self::LG11];

    pub fn new(p: u32, ell: i32) -> Result<Self> {
        if p > 1 || !(0..=1).contains(&ell) {
            return Err(Error::InvalidInput(format!(
                "mode (p={p}, ell={ell}) outside {{0,1}}x{{0,1}}"
            )));
        }
        Ok(Self { p, ell })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ell(&self) -> i32 {
        self.ell
    }
}

/// Complex amplitude sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    grid: GridSpec<T>,
    samples: Vec<Complex<T>>,
}

impl<T: Real> ScalarField<T> {
    pub fn from_samples(grid: GridSpec<T>, samples: Vec<Complex<T>>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a {}x{} grid",
                samples.len(),
                grid.n(),
                grid.n()
            )));
        }
        if samples
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidInput("non-finite field sample".into()));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: GridSpec<T>) -> Self {
        Self {
            grid,
            samples: vec![Complex::new(T::zero(), T::zero()); grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex<T> {
        self.samples[iy * self.grid.n() + ix]
    }

    /// Σ|f|²ΔA
    pub fn norm_sqr(&self) -> T {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<T>() * self.grid.cell_area()
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|&s| s * c).collect(),
        }
    }
}

/// Non-negative real intensity sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityMap<T> {
    grid: GridSpec<T>,
    samples: Vec<T>,
}

impl<T: Real> IntensityMap<T> {
    pub fn from_samples(grid: GridSpec<T>, samples: Vec<T>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a {}x{} grid",
                samples.len(),
                grid.n(),
                grid.n()
            )));
        }
        if samples.iter().any(|&s| !s.is_finite() || s < T::zero()) {
            return Err(Error::InvalidInput(
                "intensity samples must be finite and >= 0".into(),
            ));
        }
        Ok(Self { grid, samples })
    }

    /// Constructor for callers that already guarantee the invariants.
    pub(crate) fn from_raw(grid: GridSpec<T>, samples: Vec<T>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn zeros(grid: GridSpec<T>) -> Self {
        Self::from_raw(grid, vec![T::zero(); grid.len()])
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn at(&self, ix: usize, iy: usize) -> T {
        self.samples[iy * self.grid.n() + ix]
    }

    /// Σ I·ΔA
    pub fn integral(&self) -> T {
        self.samples.iter().copied().sum::<T>() * self.grid.cell_area()
    }

    pub fn max(&self) -> T {
        self.samples.iter().copied().fold(T::zero(), T::max)
    }

    /// Storage index of the first maximal sample.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.samples.iter().enumerate() {
            if s > self.samples[best] {
                best = i;
            }
        }
        best
    }

    /// Copy rescaled to unit integral, or `None` for an all-zero map.
    pub fn normalized(&self) -> Option<Self> {
        let total = self.integral();
        if !(total > T::zero()) {
            return None;
        }
        Some(Self::from_raw(
            self.grid,
            self.samples.iter().map(|&s| s / total).collect(),
        ))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.samples
            .iter()
            .zip(other.samples.iter())
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Zero every sample farther than `radius` (physical units) from the grid center.
    pub fn masked(&self, radius: T) -> Self {
        let r2 = radius * radius;
        let samples = self
            .grid
            .points()
            .zip(self.samples.iter())
            .map(|((x, y), &s)| if x * x + y * y <= r2 { s } else { T::zero() })
            .collect();
        Self::from_raw(self.grid, samples)
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Waist-plane LG_{p,ℓ} sampled on `grid`, with the continuum normalization
/// N = √(2p!/(π(p+|ℓ|)!))/w.
pub fn lg_mode<T: Real>(m: ModeIndex, grid: &GridSpec<T>) -> Result<ScalarField<T>> {
    let w = grid.waist();
    let abs_ell = m.ell.unsigned_abs();
    let norm =
        T::of((2.0 * factorial(m.p) / (std::f64::consts::PI * factorial(m.p + abs_ell))).sqrt())
            / w;
    let k = T::of(f64::from(abs_ell));
    let samples: Vec<Complex<T>> = grid
        .points()
        .map(|(x, y)| {
            let r2 = (x * x + y * y) / (w * w);
            let u = T::two() * r2;
            let laguerre = if m.p == 0 { T::one() } else { T::one() + k - u };
            let radial = norm * u.sqrt().powi(abs_ell as i32) * laguerre * (-r2).exp();
            let phase = T::of(f64::from(m.ell)) * y.atan2(x);
            Complex::from_polar(radial, phase)
        })
        .collect();
    let field = ScalarField::from_samples(*grid, samples)?;
    let deviation = (field.norm_sqr() - T::one()).abs().to_f64_lossy();
    if deviation > NORM_TOL {
        return Err(Error::GridTooCoarse { deviation });
    }
    Ok(field)
}

/// Σ conj(f)·g·ΔA
pub fn inner_product<T: Real>(f: &ScalarField<T>, g: &ScalarField<T>) -> Result<Complex<T>> {
    f.grid.check_same(&g.grid)?;
    let sum = f
        .samples
        .iter()
        .zip(g.samples.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
            acc + a.conj() * b
        });
    Ok(sum * f.grid.cell_area())
}

/// Pointwise Σ cᵢ·fᵢ, not renormalized.
pub fn superpose<T: Real>(terms: &[(Complex<T>, &ScalarField<T>)]) -> Result<ScalarField<T>> {
    let (_, first) = terms.first().ok_or(Error::EmptyTermList)?;
    let grid = first.grid;
    let mut out = ScalarField::zeros(grid);
    for (c, f) in terms {
        grid.check_same(&f.grid)?;
        for (o, s) in out.samples.iter_mut().zip(f.samples.iter()) {
            *o += *s * *c;
        }
    }
    Ok(out)
}

/// The optical Bell analogues |ψ⁺) and |φ⁺).
#[derive(Clone, Debug)]
pub struct BellModes<T> {
    pub psi_plus: ScalarField<T>,
    pub phi_plus: ScalarField<T>,
}

/// ψ⁺ = (LG₀₀ + LG₁₁)/√2 and φ⁺ = (LG₀₁ + LG₁₀)/√2.
pub fn bell_modes<T: Real>(grid: &GridSpec<T>) -> Result<BellModes<T>> {
    let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    let [lg00, lg01, lg10, lg11] = lg_basis(grid)?;
    Ok(BellModes {
        psi_plus: superpose(&[(h, &lg00), (h, &lg11)])?,
        phi_plus: superpose(&[(h, &lg01), (h, &lg10)])?,
    })
}

/// The four modes in [`ModeIndex::ALL`] order.
pub fn lg_basis<T: Real>(grid: &GridSpec<T>) -> Result<[ScalarField<T>; 4]> {
    Ok([
        lg_mode(ModeIndex::LG00, grid)?,
        lg_mode(ModeIndex::LG01, grid)?,
        lg_mode(ModeIndex::LG10, grid)?,
        lg_mode(ModeIndex::LG11, grid)?,
    ])
}

/// Pointwise |f|².
pub fn intensity<T: Real>(f: &ScalarField<T>) -> IntensityMap<T> {
    IntensityMap::from_raw(f.grid, f.samples.iter().map(|c| c.norm_sqr()).collect())
}

/// Matrix of pairwise inner products.
pub fn gram_matrix<T: Real>(fields: &[ScalarField<T>]) -> Result<Vec<Vec<Complex<T>>>> {
    fields
        .iter()
        .map(|f| fields.iter().map(|g| inner_product(f, g)).collect())
        .collect()
}

/// Largest |G − I| entry, split into (diagonal, off-diagonal).
pub fn identity_deviation<T: Real>(gram: &[Vec<Complex<T>>]) -> (T, T) {
    let mut diag = T::zero();
    let mut off = T::zero();
    for (i, row) in gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            if i == j {
                diag = diag.max((*g - Complex::new(T::one(), T::zero())).norm());
            } else {
                off = off.max(g.norm());
            }
        }
    }
    (diag, off)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> GridSpec<f64> {
        GridSpec::new(n, 4.0, 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(8, 4.0, 1.0).is_err());
        assert!(GridSpec::new(64, 2.0, 1.0).is_err());
        assert!(GridSpec::new(64, 4.0, 0.0).is_err());
        let g = grid(64);
        assert_eq!(g.pitch(), 0.125);
        assert_eq!(g.coordinate(0), -3.9375);
        assert_eq!(g.coordinate(63), 3.9375);
    }

    #[test]
    fn mode_index_is_restricted() {
        assert!(ModeIndex::new(2, 0).is_err());
        assert!(ModeIndex::new(0, -1).is_err());
        assert_eq!(ModeIndex::new(1, 1).unwrap(), ModeIndex::LG11);
    }

    #[test]
    fn fundamental_mode_peaks_at_center() {
        let g = grid(64);
        let i = intensity(&lg_mode(ModeIndex::LG00, &g).unwrap());
        let peak = i.argmax();
        let (ix, iy) = (peak % 64, peak / 64);
        assert!((31..=32).contains(&ix) && (31..=32).contains(&iy));
    }

    #[test]
    fn vortex_has_null_at_origin() {
        // Odd n puts a pixel exactly on the axis.
        let g = GridSpec::new(65, 4.0, 1.0).unwrap();
        let f = lg_mode(ModeIndex::LG01, &g).unwrap();
        assert_eq!(f.at(32, 32).norm(), 0.0);
        let f = lg_mode(ModeIndex::LG11, &g).unwrap();
        assert_eq!(f.at(32, 32).norm(), 0.0);
    }

    #[test]
    fn modes_are_orthonormal_on_default_grid() {
        let g = GridSpec::default();
        let gram = gram_matrix(&lg_basis(&g).unwrap()).unwrap();
        let (diag, off) = identity_deviation(&gram);
        assert!(diag <= 1e-3 && off <= 1e-3, "{diag:e} {off:e}");
    }

    #[test]
    fn boundary_leakage_is_negligible() {
        // Compare the truncated-window norm against the continuum value 1.
        for f in lg_basis(&GridSpec::default()).unwrap() {
            assert!((f.norm_sqr() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn inner_product_properties() {
        let g = grid(128);
        let [a, _, _, d] = lg_basis(&g).unwrap();
        assert!((inner_product(&a, &a).unwrap().re - 1.0).abs() < 1e-3);
        assert!(inner_product(&a, &d).unwrap().norm() < 1e-3);
        let alpha = Complex::new(0.3, -1.7);
        let lhs = inner_product(&a, &d.scale(alpha)).unwrap();
        let rhs = alpha * inner_product(&a, &d).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
        let other = lg_mode(ModeIndex::LG00, &grid(64)).unwrap();
        assert!(matches!(
            inner_product(&a, &other),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn superpose_cases() {
        let g = grid(64);
        let [a, _, _, d] = lg_basis(&g).unwrap();
        let one = Complex::new(1.0, 0.0);
        assert_eq!(superpose(&[(one, &a)]).unwrap(), a);
        let zero = superpose(&[(one, &a), (-one, &a)]).unwrap();
        assert!(zero.samples().iter().all(|c| c.norm() == 0.0));
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = superpose(&[(h, &a), (h, &d)]).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-3);
        assert!(matches!(superpose::<f64>(&[]), Err(Error::EmptyTermList)));
        let other = lg_mode(ModeIndex::LG00, &grid(32)).unwrap();
        assert!(matches!(
            superpose(&[(one, &a), (one, &other)]),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn bell_modes_are_orthonormal() {
        let g = grid(128);
        let b = bell_modes(&g).unwrap();
        assert!(inner_product(&b.psi_plus, &b.phi_plus).unwrap().norm() < 1e-3);
        assert!((b.psi_plus.norm_sqr() - 1.0).abs() < 1e-3);
        assert!((b.phi_plus.norm_sqr() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn psi_plus_has_central_lobe() {
        let g = GridSpec::<f64>::new(65, 4.0, 1.0).unwrap();
        let b = bell_modes(&g).unwrap();
        let i = intensity(&b.psi_plus);
        let lg00 = lg_mode(ModeIndex::LG00, &g).unwrap();
        let center = i.at(32, 32);
        assert!((center - 0.5 * lg00.at(32, 32).norm_sqr()).abs() < 1e-15);
        assert!(center > 0.1);
    }

    #[test]
    fn intensity_cases() {
        let g = grid(64);
        assert_eq!(intensity(&ScalarField::zeros(g)).max(), 0.0);
        let f = bell_modes(&g).unwrap().phi_plus;
        let i = intensity(&f);
        assert!((i.integral() - 1.0).abs() < 1e-3);
        let rotated = intensity(&f.scale(Complex::from_polar(1.0, 0.83)));
        assert!(i.max_abs_diff(&rotated) < 1e-15);
    }

    #[test]
    fn parseval_for_random_superpositions() {
        use rand::{Rng, SeedableRng};
        let g = grid(128);
        let basis = lg_basis(&g).unwrap();
        let mut rng = rand_pcg::Pcg64Mcg::seed_from_u64(3);
        for _ in 0..20 {
            let coeffs: Vec<Complex<f64>> = (0..4)
                .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let terms: Vec<_> = coeffs.iter().copied().zip(basis.iter()).collect();
            let f = superpose(&terms).unwrap();
            let expected: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
            assert!((f.norm_sqr() - expected).abs() <= 3e-3 * expected.max(1.0));
        }
    }

    #[test]
    fn single_precision_modes() {
        let g = GridSpec::<f32>::new(128, 4.0, 1.0).unwrap();
        let gram = gram_matrix(&lg_basis(&g).unwrap()).unwrap();
        let (diag, off) = identity_deviation(&gram);
        assert!(diag <= 1e-3 && off <= 1e-3);
    }
}
