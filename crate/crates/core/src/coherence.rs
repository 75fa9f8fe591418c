//! Partial coherence: analytic degrees of coherence and Monte-Carlo
//! ensembles of wavelengths (temporal) and incidence directions (spatial).

use std::f64::consts::PI;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::model::{wavenumber, Setup};
use crate::propagate::{detector_window, make_transfer, Propagator, TransferKind, TransferOptions};
use crate::rng::{substream, Domain};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSpec {
    /// Centre vacuum wavelength λ₀.
    pub wavelength: f64,
    pub refractive_index: f64,
    /// `+∞` for a monochromatic source.
    pub coherence_length: f64,
    pub source_angular_radius: f64,
    /// Mean incidence (θ₁, θ₂).
    pub incidence: [f64; 2],
    pub ensemble_size: usize,
    pub seed: u64,
}

impl CoherenceSpec {
    pub fn from_setup(setup: &Setup, ensemble_size: usize, seed: u64) -> Result<Self> {
        let spec = CoherenceSpec {
            wavelength: setup.wavelength,
            refractive_index: setup.refractive_index,
            coherence_length: setup.coherence_length_or_inf(),
            source_angular_radius: setup.source_angular_radius,
            incidence: setup.incidence,
            ensemble_size,
            seed,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if self.ensemble_size == 0 {
            return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
        }
        if !(self.coherence_length > 0.0) {
            return Err(Error::InvalidArgument("coherence length must be positive".into()));
        }
        if !(self.source_angular_radius >= 0.0) {
            return Err(Error::InvalidArgument("source angular radius must be non-negative".into()));
        }
        Ok(())
    }

    pub fn wavenumber(&self) -> f64 {
        wavenumber(self.wavelength, self.refractive_index)
    }

    /// Spectral standard deviation σ_ν such that |γ_temp(L_c/c)| = ½.
    pub fn frequency_spread(&self) -> f64 {
        let tau_c = self.coherence_length / SPEED_OF_LIGHT;
        (2f64.ln() / 2.0).sqrt() / (PI * tau_c)
    }

    /// `σ_λ = λ₀²σ_ν/c`.
    pub fn wavelength_spread(&self) -> f64 {
        self.wavelength * self.wavelength * self.frequency_spread() / SPEED_OF_LIGHT
    }
}

/// Temporal degree of coherence of a Gaussian spectrum, carrier included.
pub fn gamma_temporal(tau: f64, spec: &CoherenceSpec) -> Complex64 {
    let nu0 = SPEED_OF_LIGHT / spec.wavelength;
    let sigma = if spec.coherence_length.is_infinite() { 0.0 } else { spec.frequency_spread() };
    let modulus = (-2.0 * PI * PI * sigma * sigma * tau * tau).exp();
    Complex64::from_polar(modulus, -2.0 * PI * nu0 * tau)
}

/// `2J₁(u)/u` with `u = k·tanα·δ`.
pub fn gamma_spatial(delta: f64, spec: &CoherenceSpec) -> f64 {
    let u = spec.wavenumber() * spec.source_angular_radius.tan() * delta;
    if u.abs() < 1e-8 {
        1.0 - u * u / 8.0
    } else {
        2.0 * libm::j1(u) / u
    }
}

/// γ(δ, τ) = γ_spa(δ)·γ_temp(τ).
pub fn degree_of_coherence(delta: f64, tau: f64, spec: &CoherenceSpec) -> Complex64 {
    gamma_temporal(tau, spec) * gamma_spatial(delta, spec)
}

/// Optical path difference between the wave diffracted at lateral offset
/// `delta` from the shadow boundary and the direct illumination wave.
/// Equals L_c at `+p⁺` and `−p⁻` of the spectral half-widths.
pub fn optical_path_difference(delta: f64, distance: f64, theta: f64, index: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let x = distance * theta.tan() + delta;
    index * (x.hypot(distance) - delta * s - distance / c)
}

/// μᵢ(Δ) along dimension `dim`.
pub fn mutual_coherence_factor(delta: f64, dim: usize, spec: &CoherenceSpec, setup: &Setup) -> Complex64 {
    let theta = setup.incidence[dim];
    let opd = optical_path_difference(delta, setup.distance, theta, setup.refractive_index);
    degree_of_coherence(delta / theta.cos(), opd / SPEED_OF_LIGHT, spec)
}

/// One realisation of a partially coherent illumination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub wavelength: f64,
    pub incidence: [f64; 2],
}

/// `M` wavelengths drawn from `N(λ₀, σ_λ)`.
pub fn mc_temporal_ensemble(spec: &CoherenceSpec) -> Result<Vec<f64>> {
    spec.check()?;
    if spec.coherence_length.is_infinite() {
        return Err(Error::InvalidArgument("temporal ensemble needs a finite coherence length".into()));
    }
    let sigma = spec.wavelength_spread();
    Ok((0..spec.ensemble_size as u64)
        .map(|m| {
            let mut rng = substream(spec.seed, Domain::Temporal, m);
            loop {
                let z: f64 = rng.sample(StandardNormal);
                let lambda = spec.wavelength + sigma * z;
                if lambda > 0.0 {
                    break lambda;
                }
            }
        })
        .collect())
}

/// `M` incidence pairs uniform over the disk of angular radius α about θ.
pub fn mc_spatial_ensemble(spec: &CoherenceSpec) -> Result<Vec<[f64; 2]>> {
    spec.check()?;
    let alpha = spec.source_angular_radius;
    Ok((0..spec.ensemble_size as u64)
        .map(|m| {
            let mut rng = substream(spec.seed, Domain::Spatial, m);
            let u: f64 = rng.gen();
            let v: f64 = rng.gen();
            let r = alpha * u.sqrt();
            let phi = 2.0 * PI * v;
            [spec.incidence[0] + r * phi.cos(), spec.incidence[1] + r * phi.sin()]
        })
        .collect())
}

/// Members combining whichever coherence effects are active. A fully
/// coherent spec yields the single nominal member.
pub fn ensemble_members(spec: &CoherenceSpec) -> Result<Vec<EnsembleMember>> {
    spec.check()?;
    let temporal = spec.coherence_length.is_finite();
    let spatial = spec.source_angular_radius > 0.0;
    if !temporal && !spatial {
        return Ok(vec![EnsembleMember { wavelength: spec.wavelength, incidence: spec.incidence }]);
    }
    let lambdas = if temporal { mc_temporal_ensemble(spec)? } else { vec![spec.wavelength; spec.ensemble_size] };
    let dirs = if spatial { mc_spatial_ensemble(spec)? } else { vec![spec.incidence; spec.ensemble_size] };
    Ok(lambdas
        .into_iter()
        .zip(dirs)
        .map(|(wavelength, incidence)| EnsembleMember { wavelength, incidence })
        .collect())
}

/// `|⟨exp(j2π(ν_m − ν₀)τ)⟩|` over the ensemble.
pub fn empirical_gamma_temporal(wavelengths: &[f64], center: f64, tau: f64) -> f64 {
    let nu0 = SPEED_OF_LIGHT / center;
    let sum: Complex64 = wavelengths
        .iter()
        .map(|l| Complex64::from_polar(1.0, 2.0 * PI * (SPEED_OF_LIGHT / l - nu0) * tau))
        .sum();
    sum.norm() / wavelengths.len() as f64
}

/// `|⟨exp(jkδ(sinθ_m − sinθ))⟩|` along x₁ over the ensemble.
pub fn empirical_gamma_spatial(directions: &[[f64; 2]], spec: &CoherenceSpec, delta: f64) -> f64 {
    let k = spec.wavenumber();
    let s0 = spec.incidence[0].sin();
    let sum: Complex64 = directions
        .iter()
        .map(|d| Complex64::from_polar(1.0, k * delta * (d[0].sin() - s0)))
        .sum();
    sum.norm() / directions.len() as f64
}

/// Where a simulated hologram lands and how it is propagated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationWindow {
    pub detector: [f64; 2],
    pub options: TransferOptions,
}

/// Coherent hologram for one member: shifted-AS propagation of the object
/// at the member's wavelength and incidence, then detector sampling.
pub fn member_intensity(
    object: &ComplexField,
    member: &EnsembleMember,
    setup: &Setup,
    window: &SimulationWindow,
) -> Result<Array2<f64>> {
    let s = crate::model::SetupConfig {
        wavelength: member.wavelength,
        incidence: member.incidence,
        ..setup.config().clone()
    }
    .validate()?;
    let tf = make_transfer(TransferKind::ShiftedAngularSpectrum, &object.grid, &s, window.options);
    let mut input = object.clone();
    input.wavelength = s.wavelength;
    input.refractive_index = s.refractive_index;
    let out = Propagator::new(tf).apply(&input)?;
    crate::propagate::sense_and_crop(&out, window.detector)
}

/// Mean detector intensity over the ensemble, reduced in member order with
/// compensated summation.
pub fn mc_average_intensity(
    object: &ComplexField,
    members: &[EnsembleMember],
    setup: &Setup,
    window: &SimulationWindow,
) -> Result<Array2<f64>> {
    if members.is_empty() {
        return Err(Error::InvalidArgument("ensemble is empty".into()));
    }
    let (_, [rows, cols]) = detector_window(&object.grid.shifted(window.options.output_shift), window.detector)?;
    let mut sum = Array2::<f64>::zeros((rows, cols));
    let mut comp = Array2::<f64>::zeros((rows, cols));
    // bounded batches keep memory flat while members run in parallel
    let batch = rayon::current_num_threads().max(1) * 2;
    for chunk in members.chunks(batch) {
        let images: Vec<Result<Array2<f64>>> =
            chunk.par_iter().map(|m| member_intensity(object, m, setup, window)).collect();
        for img in images {
            let img = img?;
            Zip::from(&mut sum).and(&mut comp).and(&img).for_each(|s, c, &v| {
                let y = v - *c;
                let t = *s + y;
                *c = (t - *s) - y;
                *s = t;
            });
        }
    }
    let inv = 1.0 / members.len() as f64;
    Ok(sum.mapv(|v| v * inv))
}
