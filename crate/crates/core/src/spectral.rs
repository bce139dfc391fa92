//! Periodic grids, continuum-normalized transforms and the norms built on them.
//!
//! The box `[-L/2, L/2)` stands in for the real line. Coefficients are scaled so
//! that `coeffs[k] ≈ ∫ e^{-ixξ_k} f(x) dx`, with inverse `(1/2π) ∫ e^{ixξ} f̂ dξ`
//! discretized as `(1/L) Σ_k`. Coefficients are stored in FFT order: index `i`
//! holds wavenumber `k = i` for `i < n/2` and `k = i - n` otherwise, so the
//! Nyquist mode `k = -n/2` sits at index `n/2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Shared handle to a grid; fields hold one so transforms need no extra state.
pub type GridRef = Arc<Grid>;

pub struct Grid {
    n: usize,
    length: f64,
    dx: f64,
    xs: Vec<f64>,
    xis: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

/// Builds a grid of `n` points on `[-L/2, L/2)`.
pub fn make_grid(n: usize, length: f64) -> Result<GridRef> {
    Grid::new(n, length)
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<GridRef> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::GridLength(length));
        }
        let dx = length / n as f64;
        let xs = (0..n).map(|m| -0.5 * length + m as f64 * dx).collect();
        let xis = (0..n)
            .map(|i| 2.0 * PI * wavenumber(i, n) as f64 / length)
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Arc::new(Self {
            n,
            length,
            dx,
            xs,
            xis,
            forward,
            inverse,
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Sample abscissae `x_m = -L/2 + m dx`.
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    /// Frequencies in storage order.
    pub fn xis(&self) -> &[f64] {
        &self.xis
    }

    /// Signed wavenumber stored at index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        wavenumber(i, self.n)
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Index holding wavenumber `k`, for `k ∈ [-n/2, n/2)`.
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    pub fn max_frequency(&self) -> f64 {
        PI / self.dx
    }

    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    /// Physical samples (as complex) to continuum-scaled coefficients, in place.
    pub fn forward_in_place(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
        // e^{-i x_m ξ_k} = (-1)^k e^{-2πimk/n} because x_0 = -L/2.
        for (i, c) in buf.iter_mut().enumerate() {
            let s = if self.wavenumber(i) % 2 == 0 {
                self.dx
            } else {
                -self.dx
            };
            *c *= s;
        }
    }

    /// Continuum-scaled coefficients back to physical samples, in place.
    pub fn inverse_in_place(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        let scale = 1.0 / self.length;
        for (i, c) in buf.iter_mut().enumerate() {
            let s = if self.wavenumber(i) % 2 == 0 {
                scale
            } else {
                -scale
            };
            *c *= s;
        }
        self.inverse.process_with_scratch(buf, scratch);
    }

    /// Multiplier `|ξ_k|^α`; zero at `ξ = 0`.
    pub fn dissipation_symbol(&self, alpha: f64) -> Result<Vec<f64>> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Alpha(alpha, "(0, 2]"));
        }
        Ok(self.xis.iter().map(|xi| xi.abs().powf(alpha)).collect())
    }

    /// Multiplier `iξ_k³`. The unpaired Nyquist mode gets 0 so the symbol stays odd.
    pub fn dispersion_symbol(&self) -> Vec<Complex64> {
        let ny = self.nyquist_index();
        self.xis
            .iter()
            .enumerate()
            .map(|(i, xi)| {
                if i == ny {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, xi * xi * xi)
                }
            })
            .collect()
    }

    /// Linear symbol `σ = iξ³ - |ξ|^α`, so that `∂_t û = σ û` is the linear flow.
    pub fn linear_symbol(&self, alpha: f64) -> Result<Vec<Complex64>> {
        let diss = self.dissipation_symbol(alpha)?;
        Ok(self
            .dispersion_symbol()
            .into_iter()
            .zip(diss)
            .map(|(d, a)| d - a)
            .collect())
    }

    /// `(iξ)^j` with the Nyquist entry zeroed for odd `j`.
    pub fn derivative_symbol(&self, j: usize) -> Vec<Complex64> {
        let ny = self.nyquist_index();
        self.xis
            .iter()
            .enumerate()
            .map(|(i, &xi)| {
                if j % 2 == 1 && i == ny {
                    Complex64::new(0.0, 0.0)
                } else {
                    i_pow(j) * xi.powi(j as i32)
                }
            })
            .collect()
    }

    /// Number of samples at each edge inspected by the decay guard.
    pub fn edge_width(&self) -> usize {
        (self.n / 64).max(2)
    }
}

fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// `i^j`.
pub(crate) fn i_pow(j: usize) -> Complex64 {
    match j % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Lebesgue exponents supported by the norm routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lp {
    One,
    Two,
    Inf,
}

impl Lp {
    pub const ALL: [Lp; 3] = [Lp::One, Lp::Two, Lp::Inf];

    /// `1 - 1/p`.
    pub fn conjugate_weight(self) -> f64 {
        match self {
            Lp::One => 0.0,
            Lp::Two => 0.5,
            Lp::Inf => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Lp::One => "1",
            Lp::Two => "2",
            Lp::Inf => "inf",
        }
    }

    pub fn parse(s: &str) -> Option<Lp> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Some(Lp::One),
            "2" => Some(Lp::Two),
            "inf" | "infinity" | "∞" => Some(Lp::Inf),
            _ => None,
        }
    }
}

impl fmt::Display for Lp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One measured `‖∂_x^j f‖_{L^p}` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormPoint {
    pub t: f64,
    pub p: Lp,
    pub j: usize,
    pub value: f64,
}

/// A moment together with the outcome of the boundary decay guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: f64,
    pub decay_ok: bool,
}

/// Relative boundary amplitude below which a field counts as decayed.
pub const DECAY_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridRef,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridRef,
    coeffs: Vec<Complex64>,
}

impl RealField {
    pub fn new(grid: GridRef, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::ShapeMismatch {
                expected: grid.n(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridRef) -> Self {
        let n = grid.n();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: GridRef, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.xs().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn to_spectral(&self) -> SpectralField {
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        let mut scratch = vec![Complex64::default(); self.grid.scratch_len()];
        self.grid.forward_in_place(&mut buf, &mut scratch);
        SpectralField {
            grid: self.grid.clone(),
            coeffs: buf,
        }
    }

    pub fn lp_norm(&self, p: Lp) -> f64 {
        let dx = self.grid.dx();
        match p {
            Lp::One => dx * self.values.iter().map(|v| v.abs()).sum::<f64>(),
            Lp::Two => (dx * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt(),
            Lp::Inf => self.max_abs(),
        }
    }

    /// Homogeneous Sobolev norm `‖∂_x^j f‖_{L^p}`.
    pub fn sobolev_norm(&self, p: Lp, j: usize) -> f64 {
        if j == 0 {
            self.lp_norm(p)
        } else {
            self.to_spectral().derivative(j).to_physical().lp_norm(p)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mass(&self) -> f64 {
        self.grid.dx() * self.values.iter().sum::<f64>()
    }

    /// Largest `|f|` over the outer edge samples on both sides of the box.
    pub fn boundary_amplitude(&self) -> f64 {
        let w = self.grid.edge_width();
        let n = self.values.len();
        self.values[..w]
            .iter()
            .chain(&self.values[n - w..])
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True when the boundary amplitude is at most `rel` times the peak.
    pub fn decays_within(&self, rel: f64) -> bool {
        self.boundary_amplitude() <= rel * self.max_abs()
    }

    /// `M_j(f) = ∫ f(x) x^j dx` as a dx-weighted sum.
    pub fn moment(&self, j: usize) -> Moment {
        let dx = self.grid.dx();
        let value = dx
            * self
                .values
                .iter()
                .zip(self.grid.xs())
                .map(|(v, x)| v * x.powi(j as i32))
                .sum::<f64>();
        Moment {
            value,
            decay_ok: self.decays_within(DECAY_GUARD),
        }
    }

    /// `x ↦ λ f(λx)` via the trigonometric interpolant of `f`.
    ///
    /// For `λ > 1` the samples that would be read from outside the box must be
    /// negligible, and the spectrum must leave room for the stretched frequencies.
    pub fn rescale(&self, lambda: f64) -> Result<RealField> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Rescale {
                lambda,
                reason: "scale must be positive",
            });
        }
        if lambda == 1.0 {
            return Ok(self.clone());
        }
        let grid = &self.grid;
        let half = 0.5 * grid.length();
        let peak = self.max_abs();
        let coeffs = self.to_spectral();
        if lambda > 1.0 {
            let outside = self
                .values
                .iter()
                .zip(grid.xs())
                .filter(|(_, x)| x.abs() >= half / lambda)
                .fold(0.0f64, |m, (v, _)| m.max(v.abs()));
            if outside > DECAY_GUARD * peak {
                return Err(Error::Rescale {
                    lambda,
                    reason: "field is not negligible where the stretched samples leave the box",
                });
            }
            let cmax = coeffs.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
            let kcut = grid.n() as f64 / (2.0 * lambda);
            let high = coeffs
                .coeffs
                .iter()
                .enumerate()
                .filter(|(i, _)| grid.wavenumber(*i).unsigned_abs() as f64 > kcut)
                .fold(0.0f64, |m, (_, c)| m.max(c.norm()));
            if high > DECAY_GUARD * cmax {
                return Err(Error::Rescale {
                    lambda,
                    reason: "spectrum too wide for the compressed field",
                });
            }
        }
        let values = grid
            .xs()
            .iter()
            .map(|&x| {
                let y = lambda * x;
                if y < -half || y >= half {
                    0.0
                } else {
                    lambda * coeffs.interpolate(y)
                }
            })
            .collect();
        RealField::new(grid.clone(), values)
    }

    fn check_same_grid(&self, other: &RealField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn sub(&self, other: &RealField) -> Result<RealField> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn add_scaled(&self, other: &RealField, scale: f64) -> Result<RealField> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn scaled(&self, scale: f64) -> RealField {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * scale).collect(),
        }
    }
}

impl SpectralField {
    pub fn new(grid: GridRef, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::ShapeMismatch {
                expected: grid.n(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: GridRef) -> Self {
        let n = grid.n();
        Self {
            grid,
            coeffs: vec![Complex64::default(); n],
        }
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Inverse transform; the imaginary residue of a Hermitian spectrum is dropped.
    pub fn to_physical(&self) -> RealField {
        let mut buf = self.coeffs.clone();
        let mut scratch = vec![Complex64::default(); self.grid.scratch_len()];
        self.grid.inverse_in_place(&mut buf, &mut scratch);
        RealField {
            grid: self.grid.clone(),
            values: buf.into_iter().map(|c| c.re).collect(),
        }
    }

    /// Multiplies by `(iξ)^j`.
    pub fn derivative(&self, j: usize) -> SpectralField {
        if j == 0 {
            return self.clone();
        }
        let symbol = self.grid.derivative_symbol(j);
        self.multiply(&symbol)
    }

    pub fn multiply(&self, symbol: &[Complex64]) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(symbol)
                .map(|(c, s)| c * s)
                .collect(),
        }
    }

    pub fn multiply_real(&self, symbol: &[f64]) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(symbol)
                .map(|(c, s)| c * s)
                .collect(),
        }
    }

    /// Pointwise product of spectra: the transform of the convolution.
    pub fn convolve(&self, other: &SpectralField) -> Result<SpectralField> {
        if *self.grid != *other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.multiply(&other.coeffs))
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        if *self.grid != *other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(SpectralField {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// `‖f‖_{L²}` by Plancherel: `(1/2π) Σ |f̂_k|² (2π/L)`.
    pub fn l2_norm(&self) -> f64 {
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.grid.length()).sqrt()
    }

    /// Largest `|f̂(-ξ) - conj f̂(ξ)|` over paired modes.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        (1..n)
            .map(|i| (self.coeffs[n - i] - self.coeffs[i].conj()).norm())
            .chain(std::iter::once(self.coeffs[0].im.abs()))
            .fold(0.0, f64::max)
    }

    /// Value of the real trigonometric interpolant at an arbitrary point.
    pub fn interpolate(&self, y: f64) -> f64 {
        let n = self.grid.n();
        let ny = n / 2;
        let step = 2.0 * PI * y / self.grid.length();
        let rot = Complex64::from_polar(1.0, step);
        let mut acc = self.coeffs[0].re;
        let mut w = Complex64::new(1.0, 0.0);
        for k in 1..ny {
            // re-seed the rotation periodically to bound drift
            w = if k % 256 == 0 {
                Complex64::from_polar(1.0, step * k as f64)
            } else {
                w * rot
            };
            acc += 2.0 * (self.coeffs[k] * w).re;
        }
        acc += self.coeffs[ny].re * (step * ny as f64).cos();
        acc / self.grid.length()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_grid() -> GridRef {
        make_grid(256, 40.0).unwrap()
    }

    #[test]
    fn grid_examples() {
        let g = make_grid(8, 16.0).unwrap();
        assert_eq!(g.dx(), 2.0);
        let mut ks: Vec<i64> = (0..8).map(|i| g.wavenumber(i)).collect();
        ks.sort();
        assert_eq!(ks, vec![-4, -3, -2, -1, 0, 1, 2, 3]);
        for i in 0..8 {
            assert!((g.xis()[i] - PI * g.wavenumber(i) as f64 / 8.0).abs() < 1e-15);
        }
        assert_eq!(g.xs()[0], -8.0);

        let g = make_grid(1024, 256.0 * PI).unwrap();
        assert!((g.dx() - PI / 4.0).abs() < 1e-15);
        assert_eq!(make_grid(12, 10.0).unwrap_err(), Error::GridSize(12));
        assert!(make_grid(4, 10.0).is_err());
        assert!(make_grid(16, 0.0).is_err());
        assert!(make_grid(16, -1.0).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = make_grid(32, 1.0).unwrap();
        for i in 0..32 {
            assert_eq!(g.index_of(g.wavenumber(i)), i);
        }
    }

    #[test]
    fn zero_field_transforms_to_zero() {
        let g = gaussian_grid();
        let f = RealField::zeros(g);
        assert!(f.to_spectral().coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let g = gaussian_grid();
        let f = RealField::from_fn(g.clone(), |x| (-0.5 * x * x).exp()).unwrap();
        let s = f.to_spectral();
        let err = s
            .coeffs()
            .iter()
            .zip(g.xis())
            .map(|(c, xi)| (c - (2.0 * PI).sqrt() * (-0.5 * xi * xi).exp()).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "err = {err}");
        assert!(s.hermitian_defect() < 1e-14);
        assert!((s.coeffs()[0].re - f.mass()).abs() < 1e-14);
    }

    #[test]
    fn sine_derivative_is_exact() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let xi0 = 5.0;
        let f = RealField::from_fn(g.clone(), |x| (xi0 * x).sin()).unwrap();
        let d = f.to_spectral().derivative(1).to_physical();
        for (v, x) in d.values().iter().zip(g.xs()) {
            assert!((v - xi0 * (xi0 * x).cos()).abs() < 1e-12);
        }
        let id = f.to_spectral().derivative(0).to_physical();
        assert_eq!(id.values().len(), 64);
    }

    #[test]
    fn odd_derivative_kills_nyquist() {
        let g = make_grid(16, 16.0).unwrap();
        // cos(π x / dx) with dx = 1 is the pure Nyquist mode
        let f = RealField::from_fn(g.clone(), |x| (PI * x).cos()).unwrap();
        let d = f.to_spectral().derivative(1).to_physical();
        assert!(d.max_abs() < 1e-12);
        let d2 = f.to_spectral().derivative(2).to_physical();
        assert!((d2.max_abs() - PI * PI).abs() < 1e-10);
    }

    #[test]
    fn gaussian_third_derivative_matches_finite_differences() {
        let g = make_grid(512, 40.0).unwrap();
        let f = |x: f64| (-x * x).exp();
        let field = RealField::from_fn(g.clone(), f).unwrap();
        let d3 = field.to_spectral().derivative(3).to_physical();
        let h = 1e-2;
        let mut err: f64 = 0.0;
        for (v, &x) in d3.values().iter().zip(g.xs()) {
            let fd = (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h))
                / (2.0 * h * h * h);
            err = err.max((v - fd).abs());
        }
        // centered stencil error is O(h²) with a modest constant
        assert!(err < 50.0 * h * h, "err = {err}");
    }

    #[test]
    fn symbols() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let d = g.dissipation_symbol(2.0).unwrap();
        let i3 = g.index_of(3);
        assert_eq!(d[0], 0.0);
        assert!((d[i3] - 9.0).abs() < 1e-12);
        let d1 = g.dissipation_symbol(1.0).unwrap();
        assert!((d1[g.index_of(-2)] - 2.0).abs() < 1e-12);
        assert!(g.dissipation_symbol(0.0).is_err());
        assert!(g.dissipation_symbol(2.5).is_err());

        let s = g.dispersion_symbol();
        assert_eq!(s[0], Complex64::new(0.0, 0.0));
        assert!((s[g.index_of(1)] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        for k in 1..8 {
            let a = s[g.index_of(k)];
            let b = s[g.index_of(-k)];
            assert_eq!(a.re, 0.0);
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_norms() {
        let g = make_grid(512, 40.0).unwrap();
        let f = RealField::from_fn(g.clone(), |x| (-x * x).exp()).unwrap();
        assert!((f.lp_norm(Lp::One) - PI.sqrt()).abs() < 1e-10);
        assert!((f.lp_norm(Lp::Two) - (PI / 2.0).powf(0.25)).abs() < 1e-10);
        assert_eq!(RealField::zeros(g.clone()).lp_norm(Lp::Two), 0.0);

        let h = RealField::from_fn(g.clone(), |x| (-0.5 * x * x).exp()).unwrap();
        assert!((h.sobolev_norm(Lp::Two, 0) - PI.powf(0.25)).abs() < 1e-10);
        assert!((h.sobolev_norm(Lp::Two, 1) - PI.powf(0.25) / 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_moments() {
        let g = make_grid(512, 40.0).unwrap();
        let f = RealField::from_fn(g.clone(), |x| (-x * x).exp()).unwrap();
        let m0 = f.moment(0);
        assert!(m0.decay_ok);
        assert!((m0.value - PI.sqrt()).abs() < 1e-12);
        assert!(f.moment(1).value.abs() < 1e-12 * f.lp_norm(Lp::One) * g.length());
        assert!((f.moment(2).value - PI.sqrt() / 2.0).abs() < 1e-12);

        let wide = RealField::from_fn(g, |x| (-x * x / 100.0).exp()).unwrap();
        assert!(!wide.moment(0).decay_ok);
    }

    #[test]
    fn plancherel() {
        let g = gaussian_grid();
        let f = RealField::from_fn(g, |x| (-(x - 1.0) * (x - 1.0)).exp() * (3.0 * x).cos())
            .unwrap();
        let a = f.lp_norm(Lp::Two);
        let b = f.to_spectral().l2_norm();
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn rescale_identity_and_scaling() {
        let g = make_grid(1024, 80.0).unwrap();
        let f = RealField::from_fn(g.clone(), |x| (-(x - 0.5) * (x - 0.5)).exp()).unwrap();
        assert_eq!(f.rescale(1.0).unwrap(), f);
        for &lambda in &[0.5, 0.8, 1.7, 2.5] {
            let r = f.rescale(lambda).unwrap();
            assert!((r.moment(0).value - f.moment(0).value).abs() < 1e-10 * f.moment(0).value);
            for j in 0..3 {
                let lhs = r.sobolev_norm(Lp::Two, j);
                let rhs = lambda.powf(j as f64 + 0.5) * f.sobolev_norm(Lp::Two, j);
                assert!((lhs - rhs).abs() < 1e-8 * rhs, "λ={lambda} j={j}");
            }
        }
    }

    #[test]
    fn rescale_errors() {
        let g = make_grid(256, 20.0).unwrap();
        let f = RealField::from_fn(g.clone(), |x| (-x * x / 4.0).exp()).unwrap();
        assert!(f.rescale(0.0).is_err());
        assert!(f.rescale(-1.0).is_err());
        // stretched samples read from |y| ≥ 10/4 where the bump is far from negligible
        assert!(matches!(f.rescale(4.0), Err(Error::Rescale { .. })));
        // a field at the edge of resolution cannot be compressed further
        let rough = RealField::from_fn(g, |x| (-x * x).exp() * (5.0 * x).cos()).unwrap();
        assert!(matches!(rough.rescale(3.0), Err(Error::Rescale { .. })));
    }

    #[test]
    fn field_validation() {
        let g = make_grid(8, 1.0).unwrap();
        assert!(matches!(
            RealField::new(g.clone(), vec![0.0; 7]),
            Err(Error::ShapeMismatch { .. })
        ));
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert_eq!(RealField::new(g, v).unwrap_err(), Error::NonFinite(3));
    }
}
