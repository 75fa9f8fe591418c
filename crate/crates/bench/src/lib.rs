//! Shared fixtures for the benchmarks.

use holobound::scene::{make_scene, SceneKind, SceneSpec};
use holobound::{ComplexField, Grid, Setup, SetupConfig};

/// Desk geometry at incidence `theta1` (radians) with 20 dB noise.
pub fn desk_setup(theta1: f64) -> Setup {
    SetupConfig::new(530e-9, 1.0, 250e-6, [67.584e-6; 2])
        .with_incidence(theta1, 0.0)
        .with_snr_db(20.0)
        .validate()
        .expect("valid setup")
}

/// Strip grid of `n1 × n2` samples at 132 nm centred on the origin.
pub fn strip(n1: usize, n2: usize) -> Grid {
    Grid::centered(n1, n2, 132e-9, [0.0, 0.0]).expect("valid grid")
}

pub fn texture(grid: &Grid) -> ComplexField {
    make_scene(&SceneSpec::new(SceneKind::RandomTexture), 1, grid, 530e-9, 1.0)
}

pub fn plane(grid: &Grid) -> ComplexField {
    ComplexField::constant(num_complex::Complex64::new(1.0, 0.0), *grid, 530e-9, 1.0)
}
