//! Procedural sample transmittances.

use ndarray::Array2;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::fft::Fft2;
use crate::field::{ComplexField, Grid};
use crate::rng::{substream, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneKind {
    /// Smooth random amplitude and phase.
    RandomTexture,
    /// Unit-modulus three-bar groups with a π/2 phase step.
    PhaseTarget,
    /// Opaque three-bar groups on a clear background.
    AmplitudeTarget,
}

impl SceneKind {
    pub const ALL: [SceneKind; 3] = [SceneKind::RandomTexture, SceneKind::PhaseTarget, SceneKind::AmplitudeTarget];
}

/// Correlation length of [`SceneKind::RandomTexture`] unless overridden.
pub const DEFAULT_TEXTURE_CORRELATION: f64 = 2e-6;

const BAR_WIDTHS: [f64; 5] = [0.5e-6, 1e-6, 2e-6, 4e-6, 8e-6];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub kind: SceneKind,
    pub texture_correlation: f64,
}

impl SceneSpec {
    pub fn new(kind: SceneKind) -> Self {
        SceneSpec { kind, texture_correlation: DEFAULT_TEXTURE_CORRELATION }
    }
}

/// Transmittance with `|o| ≤ 1`, identical for identical `(spec, seed, grid)`.
pub fn make_scene(spec: &SceneSpec, seed: u64, grid: &Grid, wavelength: f64, refractive_index: f64) -> ComplexField {
    let mut rng = substream(seed, Domain::Scene, 0);
    let samples = match spec.kind {
        SceneKind::RandomTexture => texture(&mut rng, grid, spec.texture_correlation),
        SceneKind::PhaseTarget => {
            let bars = bar_mask(&mut rng, grid);
            bars.mapv(|b| if b { Complex64::new(0.0, 1.0) } else { Complex64::new(1.0, 0.0) })
        }
        SceneKind::AmplitudeTarget => {
            let bars = bar_mask(&mut rng, grid);
            bars.mapv(|b| Complex64::new(if b { 0.0 } else { 1.0 }, 0.0))
        }
    };
    ComplexField { samples, grid: *grid, wavelength, refractive_index }
}

/// Column-wise bar groups along x₁ starting at a random offset.
fn bar_mask(rng: &mut ChaCha8Rng, grid: &Grid) -> Array2<bool> {
    let width = grid.extent()[0];
    let mut cols = vec![false; grid.n1];
    let mut x = rng.gen_range(0.0..20e-6);
    while x < width {
        let w = *BAR_WIDTHS.choose(rng).expect("non-empty");
        for b in 0..3 {
            let lo = x + 2.0 * b as f64 * w;
            let hi = lo + w;
            let first = (lo / grid.pitch).ceil().max(0.0) as usize;
            for (c, col) in cols.iter_mut().enumerate().skip(first) {
                if c as f64 * grid.pitch >= hi {
                    break;
                }
                *col = true;
            }
        }
        x += 6.0 * w + rng.gen_range(5e-6..30e-6);
    }
    Array2::from_shape_fn(grid.shape(), |(_, c)| cols[c])
}

fn texture(rng: &mut ChaCha8Rng, grid: &Grid, correlation: f64) -> Array2<Complex64> {
    let amp = smooth_noise(rng, grid, correlation);
    let phase = smooth_noise(rng, grid, correlation);
    Array2::from_shape_fn(grid.shape(), |idx| {
        Complex64::from_polar((0.75 + 0.25 * amp[idx]).clamp(0.0, 1.0), phase[idx])
    })
}

/// White noise low-passed by a Gaussian of width `correlation`, scaled to
/// unit standard deviation.
fn smooth_noise(rng: &mut ChaCha8Rng, grid: &Grid, correlation: f64) -> Array2<f64> {
    let (rows, cols) = grid.shape();
    let mut data = Array2::from_shape_simple_fn((rows, cols), || Complex64::new(rng.sample(StandardNormal), 0.0));
    let fft = Fft2::new(rows, cols);
    fft.forward(&mut data);
    let om1 = grid.omega1();
    let om2 = grid.omega2();
    let c2 = correlation * correlation / 2.0;
    for ((r, c), v) in data.indexed_iter_mut() {
        *v *= (-(om1[c] * om1[c] + om2[r] * om2[r]) * c2).exp();
    }
    fft.inverse(&mut data);
    let real = data.mapv(|v| v.re);
    let mean = real.iter().sum::<f64>() / real.len() as f64;
    let var = real.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / real.len() as f64;
    let sd = var.sqrt();
    if sd > 0.0 {
        real.mapv(|v| (v - mean) / sd)
    } else {
        real
    }
}

/// Scene kinds cycled over repetitions.
pub fn scene_for_repetition(kinds: &[SceneKind], rep: usize) -> SceneKind {
    kinds[rep % kinds.len()]
}

/// Zeroes the sample for `x₁ < x_edge − t`, where `x_edge` is the left
/// detector edge projected along the illumination. Returns `false` if the
/// screen lies entirely outside the grid (scene unchanged).
pub fn mask_screen(scene: &mut ComplexField, t: f64, detector_width: f64, carrier_shift: f64) -> bool {
    let x_edge = -detector_width / 2.0 - carrier_shift;
    let cut = x_edge - t;
    let grid = scene.grid;
    let ncut = (0..grid.n1).take_while(|&c| grid.x1(c) < cut).count();
    if ncut == 0 {
        log::warn!("screen at t = {t:e} m lies beyond the grid; scene unchanged");
        return false;
    }
    scene.samples.slice_mut(ndarray::s![.., ..ncut]).fill(Complex64::new(0.0, 0.0));
    true
}
