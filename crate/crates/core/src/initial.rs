//! Rapidly decaying initial data.

use crate::error::{Error, Result};
use crate::spectral::{GridRef, RealField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// `A e^{-(x-x₀)²/σ²}`
    Gaussian,
    /// `A ((x-x₀)/σ) e^{-(x-x₀)²/σ²}`, odd about `x₀` and massless.
    DGaussian,
    /// Two Gaussians of width `σ` centred at `x₀ ± 2σ`.
    DoubleBump,
}

impl Shape {
    pub fn parse(s: &str) -> Option<Shape> {
        match s {
            "gaussian" => Some(Shape::Gaussian),
            "dgaussian" => Some(Shape::DGaussian),
            "double-bump" => Some(Shape::DoubleBump),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Shape::Gaussian => "gaussian",
            Shape::DGaussian => "dgaussian",
            Shape::DoubleBump => "double-bump",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub shape: Shape,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl InitialData {
    pub fn gaussian(amplitude: f64, center: f64, width: f64) -> Self {
        InitialData {
            shape: Shape::Gaussian,
            amplitude,
            center,
            width,
        }
    }

    /// Gaussian of width `σ` centred at 0 with total mass `mass`.
    pub fn gaussian_with_mass(mass: f64, width: f64) -> Self {
        Self::gaussian(mass / (width * std::f64::consts::PI.sqrt()), 0.0, width)
    }

    pub fn value(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.width;
        let a = self.amplitude;
        match self.shape {
            Shape::Gaussian => a * (-s * s).exp(),
            Shape::DGaussian => a * s * (-s * s).exp(),
            Shape::DoubleBump => a * ((-(s - 2.0).powi(2)).exp() + (-(s + 2.0).powi(2)).exp()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() || !self.center.is_finite() {
            return Err(Error::Parameter("amplitude and center must be finite".into()));
        }
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::Parameter(format!(
                "width must be positive, got {}",
                self.width
            )));
        }
        Ok(())
    }

    pub fn sample(&self, grid: &GridRef) -> Result<RealField> {
        self.validate()?;
        RealField::from_fn(grid.clone(), |x| self.value(x))
    }
}
