//! Truncated-interval spectral diagnostics: shooting eigenvalues, a
//! finite-difference oracle, Crank–Nicolson contraction tests and
//! conjugation (J-symmetry) residuals.

mod fd;
mod semigroup;
mod shooting;
mod symmetry;

pub use fd::{discretize_fd, fd_eigenvalue_near, fd_eigenvalues_dense, richardson, FdMatrix, RichardsonEstimate};
pub use semigroup::{cayley_growth, contraction_test, ContractionReport, CONTRACTION_SLACK};
pub use shooting::{
    annotate_oracle, annotate_r_stability, default_fd_nodes, miss_distance, truncated_eigenvalues, Eigenvalue, MissDistance,
    OracleComparison, SpectralReport,
};
pub use symmetry::{fd_symmetry_ratio, j_symmetry_residual, JSymmetryReport};

use serde::{Deserialize, Serialize};

use crate::cauchy::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::potential::Potential;

/// Search region for eigenvalues: a real interval or a complex rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub re: (f64, f64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<(f64, f64)>,
}

impl Window {
    pub fn real(a: f64, b: f64) -> Result<Self> {
        Window { re: (a, b), im: None }.validated()
    }

    pub fn rectangle(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        Window { re, im: Some(im) }.validated()
    }

    /// Parses `a,b` or `a,b,c,d` (real part `[a, b]`, imaginary part `[c, d]`).
    pub fn parse(text: &str) -> Result<Self> {
        let vals: Vec<f64> = text
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("window '{text}': {e}")))?;
        match vals.as_slice() {
            [a, b] => Window::real(*a, *b),
            [a, b, c, d] => Window::rectangle((*a, *b), (*c, *d)),
            _ => Err(Error::InvalidArgument(format!("window '{text}' needs 2 or 4 numbers"))),
        }
    }

    pub fn validated(self) -> Result<Self> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a <= b;
        if !ok(self.re) || self.re.0 == self.re.1 || !self.im.is_none_or(ok) {
            return Err(Error::InvalidArgument(format!("empty or invalid window {self:?}")));
        }
        Ok(self)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_none()
    }

    /// Imaginary range used for complex searches; a real window of length
    /// `L` is widened to `[−L/2, L/2]`.
    pub fn im_range(&self) -> (f64, f64) {
        self.im.unwrap_or_else(|| {
            let half = 0.5 * (self.re.1 - self.re.0);
            (-half, half)
        })
    }

    pub fn contains(&self, z: C64) -> bool {
        let (c, d) = self.im_range();
        let tol = 1e-12 * (1.0 + z.norm());
        z.re >= self.re.0 - tol && z.re <= self.re.1 + tol && z.im >= c - tol && z.im <= d + tol
    }
}

/// Boundary condition at `±R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Dirichlet,
}

/// Root-finding and integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralSettings {
    #[serde(skip)]
    pub tolerances: Tolerances,
    /// Points on a real window.
    pub real_grid: usize,
    /// Points per side of the complex `|d|` grid.
    pub complex_grid: usize,
    /// Grid, golden-section and Newton roots are kept when the normalised
    /// miss-distance is below this; bracketed sign changes always are.
    pub root_tol: f64,
}

impl Default for SpectralSettings {
    fn default() -> Self {
        SpectralSettings {
            tolerances: Tolerances::default(),
            real_grid: 200,
            complex_grid: 41,
            root_tol: 1e-9,
        }
    }
}

/// The operator restricted to `[−R, R]` with boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedProblem {
    pub potential: Potential,
    pub radius: f64,
    pub boundary: Boundary,
    pub window: Window,
    pub settings: SpectralSettings,
}

impl TruncatedProblem {
    pub fn new(potential: Potential, radius: f64, window: Window) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        Ok(TruncatedProblem {
            potential,
            radius,
            boundary: Boundary::Dirichlet,
            window: window.validated()?,
            settings: SpectralSettings::default(),
        })
    }

    pub fn with_settings(mut self, settings: SpectralSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        let mut tp = TruncatedProblem::new(self.potential.clone(), radius, self.window)?;
        tp.settings = self.settings;
        Ok(tp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(Window::parse("-2,-0.5").unwrap(), Window::real(-2.0, -0.5).unwrap());
        let w = Window::parse("0, 1, -0.5, 0.5").unwrap();
        assert_eq!(w.im, Some((-0.5, 0.5)));
        assert!(Window::parse("1,0").is_err());
        assert!(Window::parse("1,2,3").is_err());
        assert!(Window::parse("a,b").is_err());
        assert_eq!(Window::real(0.0, 2.0).unwrap().im_range(), (-1.0, 1.0));
    }

    #[test]
    fn radius_validated() {
        let w = Window::real(0.0, 1.0).unwrap();
        assert!(TruncatedProblem::new(Potential::free(1), 0.0, w).is_err());
        assert!(TruncatedProblem::new(Potential::free(1), 1.0, w).is_ok());
    }
}
