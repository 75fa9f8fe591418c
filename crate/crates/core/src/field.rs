//! Uniformly sampled 2D complex fields.
//!
//! Arrays are indexed `[row, col]` with x₁ running along columns and x₂
//! along rows.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling lattice: `n1` columns along x₁, `n2` rows along x₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n1: usize,
    pub n2: usize,
    pub pitch: f64,
    /// Physical (x₁, x₂) of sample `[0, 0]`.
    pub origin: [f64; 2],
}

impl Grid {
    pub fn new(n1: usize, n2: usize, pitch: f64, origin: [f64; 2]) -> Result<Grid> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidArgument("grid dimensions must be at least 1".into()));
        }
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid pitch must be positive, got {pitch}")));
        }
        Ok(Grid { n1, n2, pitch, origin })
    }

    /// Grid whose sample `[n2/2, n1/2]` sits at `center`.
    pub fn centered(n1: usize, n2: usize, pitch: f64, center: [f64; 2]) -> Result<Grid> {
        let origin = [
            center[0] - (n1 / 2) as f64 * pitch,
            center[1] - (n2 / 2) as f64 * pitch,
        ];
        Grid::new(n1, n2, pitch, origin)
    }

    /// Array shape `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.n2, self.n1)
    }

    pub fn x1(&self, col: usize) -> f64 {
        self.origin[0] + col as f64 * self.pitch
    }

    pub fn x2(&self, row: usize) -> f64 {
        self.origin[1] + row as f64 * self.pitch
    }

    pub fn extent(&self) -> [f64; 2] {
        [self.n1 as f64 * self.pitch, self.n2 as f64 * self.pitch]
    }

    /// Same lattice translated by `shift`.
    pub fn shifted(&self, shift: [f64; 2]) -> Grid {
        Grid { origin: [self.origin[0] + shift[0], self.origin[1] + shift[1]], ..*self }
    }

    /// Angular frequencies of the DFT bins along x₁, in FFT order.
    pub fn omega1(&self) -> Vec<f64> {
        angular_frequencies(self.n1, self.pitch)
    }

    pub fn omega2(&self) -> Vec<f64> {
        angular_frequencies(self.n2, self.pitch)
    }

    pub fn same_lattice(&self, other: &Grid) -> bool {
        self.n1 == other.n1 && self.n2 == other.n2 && self.pitch == other.pitch
    }
}

/// `ω_m = 2π·m/(N·Δ)` with `m = 0, 1, …, ⌈N/2⌉−1, −⌊N/2⌋, …, −1`.
pub fn angular_frequencies(n: usize, pitch: f64) -> Vec<f64> {
    let scale = 2.0 * PI / (n as f64 * pitch);
    (0..n)
        .map(|m| {
            let m = if m < n.div_ceil(2) { m as isize } else { m as isize - n as isize };
            m as f64 * scale
        })
        .collect()
}

/// Complex wave sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub samples: Array2<Complex64>,
    pub grid: Grid,
    pub wavelength: f64,
    pub refractive_index: f64,
}

impl ComplexField {
    pub fn new(samples: Array2<Complex64>, grid: Grid, wavelength: f64, refractive_index: f64) -> Result<Self> {
        if samples.dim() != grid.shape() {
            return Err(Error::GridMismatch(format!(
                "array shape {:?} does not match grid {:?}",
                samples.dim(),
                grid.shape()
            )));
        }
        let field = ComplexField { samples, grid, wavelength, refractive_index };
        if !field.energy().is_finite() {
            return Err(Error::InvalidArgument("field energy is not finite".into()));
        }
        Ok(field)
    }

    pub fn constant(value: Complex64, grid: Grid, wavelength: f64, refractive_index: f64) -> Self {
        let samples = Array2::from_elem(grid.shape(), value);
        ComplexField { samples, grid, wavelength, refractive_index }
    }

    /// Samples `f(x₁, x₂)` at every grid point.
    pub fn from_fn(
        grid: Grid,
        wavelength: f64,
        refractive_index: f64,
        mut f: impl FnMut(f64, f64) -> Complex64,
    ) -> Self {
        let samples = Array2::from_shape_fn(grid.shape(), |(r, c)| f(grid.x1(c), grid.x2(r)));
        ComplexField { samples, grid, wavelength, refractive_index }
    }

    /// `Σ|u|²·Δ²`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.pitch * self.grid.pitch
    }

    pub fn intensity(&self) -> Array2<f64> {
        self.samples.mapv(|v| v.norm_sqr())
    }
}
