//! Physical description of a lensless in-line setup.
//!
//! Lengths are meters and angles radians throughout; unit conversion happens
//! only at the I/O boundary (see [`crate::io::units`]).

use std::f64::consts::PI;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation, Violations};

/// Incidence angles at or beyond this magnitude are rejected: `cos²θ`
/// appears in several denominators.
pub const MAX_INCIDENCE: f64 = 89.0 * PI / 180.0;

/// Minimum ratio z/λ accepted by [`SetupConfig::validate`].
pub const MIN_DISTANCE_IN_WAVELENGTHS: f64 = 10.0;

/// Raw, unvalidated setup parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetupConfig {
    /// Vacuum wavelength λ.
    pub wavelength: f64,
    /// Refractive index n of the propagation medium.
    pub refractive_index: f64,
    /// Sample to detector distance z.
    pub distance: f64,
    /// Incidence (θ₁, θ₂).
    pub incidence: [f64; 2],
    /// Detector size (ℓ₁, ℓ₂).
    pub detector_size: [f64; 2],
    /// Illumination mean intensity I₀.
    pub mean_intensity: f64,
    /// Standard deviation σ of additive intensity noise.
    pub noise_sigma: f64,
    /// Camera quantization step ζ.
    pub quantization: f64,
    /// Coherence length L_c; `None` is a monochromatic source.
    pub coherence_length: Option<f64>,
    /// Angular radius α of the source; 0 is a point source.
    pub source_angular_radius: f64,
}

impl SetupConfig {
    /// A monochromatic, noise-free, point-source setup at normal incidence.
    pub fn new(wavelength: f64, refractive_index: f64, distance: f64, detector_size: [f64; 2]) -> Self {
        SetupConfig {
            wavelength,
            refractive_index,
            distance,
            incidence: [0.0, 0.0],
            detector_size,
            mean_intensity: 1.0,
            noise_sigma: 0.0,
            quantization: 0.0,
            coherence_length: None,
            source_angular_radius: 0.0,
        }
    }

    pub fn with_incidence(mut self, theta1: f64, theta2: f64) -> Self {
        self.incidence = [theta1, theta2];
        self
    }

    pub fn with_noise_sigma(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    /// Sets the noise level from an SNR in dB, `η = 10^(−SNR/20)`.
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.noise_sigma = snr_db_to_eta(snr_db) * self.mean_intensity;
        self
    }

    pub fn with_quantization(mut self, step: f64) -> Self {
        self.quantization = step;
        self
    }

    pub fn with_coherence_length(mut self, length: f64) -> Self {
        self.coherence_length = if length.is_infinite() { None } else { Some(length) };
        self
    }

    pub fn with_source_radius(mut self, alpha: f64) -> Self {
        self.source_angular_radius = alpha;
        self
    }

    /// Checks every invariant and caches the wavenumber.
    pub fn validate(self) -> Result<Setup> {
        let mut bad = Vec::new();
        let c = &self;
        if !(c.wavelength > 0.0 && c.wavelength.is_finite()) {
            bad.push(Violation::WavelengthNotPositive);
        }
        if !(c.refractive_index >= 1.0 && c.refractive_index.is_finite()) {
            bad.push(Violation::IndexBelowOne);
        }
        if !(c.distance > 0.0 && c.distance.is_finite()) {
            bad.push(Violation::DistanceNotPositive);
        } else if c.wavelength > 0.0 && c.distance <= MIN_DISTANCE_IN_WAVELENGTHS * c.wavelength {
            bad.push(Violation::DistanceTooShort);
        }
        if c.incidence.iter().any(|t| !(t.abs() < MAX_INCIDENCE)) {
            bad.push(Violation::IncidenceOutOfRange);
        }
        if c.detector_size.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            bad.push(Violation::DetectorNotPositive);
        }
        if !(c.mean_intensity > 0.0 && c.mean_intensity.is_finite()) {
            bad.push(Violation::MeanIntensityNotPositive);
        }
        if !(c.noise_sigma >= 0.0 && c.noise_sigma.is_finite()) {
            bad.push(Violation::NoiseSigmaNegative);
        }
        if !(c.quantization >= 0.0 && c.quantization.is_finite()) {
            bad.push(Violation::QuantizationNegative);
        }
        if let Some(lc) = c.coherence_length {
            if !(lc > 0.0) || lc.is_nan() {
                bad.push(Violation::CoherenceLengthNotPositive);
            }
        }
        if !(c.source_angular_radius >= 0.0 && c.source_angular_radius < PI / 2.0) {
            bad.push(Violation::SourceRadiusOutOfRange);
        }
        if !bad.is_empty() {
            return Err(Error::InvalidSetup(Violations(bad)));
        }
        let wavenumber = wavenumber(self.wavelength, self.refractive_index);
        Ok(Setup { config: self, wavenumber })
    }
}

/// `k = n·2π/λ`.
pub fn wavenumber(wavelength: f64, refractive_index: f64) -> f64 {
    refractive_index * 2.0 * PI / wavelength
}

/// `η = 10^(−SNR_dB/20)`.
pub fn snr_db_to_eta(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 20.0)
}

/// A validated [`SetupConfig`] with its wavenumber cached. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    config: SetupConfig,
    wavenumber: f64,
}

impl Setup {
    pub fn config(&self) -> &SetupConfig {
        &self.config
    }

    pub fn into_config(self) -> SetupConfig {
        self.config
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// L_c, `+∞` for a monochromatic source.
    pub fn coherence_length_or_inf(&self) -> f64 {
        self.config.coherence_length.unwrap_or(f64::INFINITY)
    }

    /// Copy of this setup at another vacuum wavelength.
    pub fn with_wavelength(&self, wavelength: f64) -> Result<Setup> {
        SetupConfig { wavelength, ..self.config.clone() }.validate()
    }

    /// Copy of this setup at another incidence.
    pub fn with_incidence(&self, incidence: [f64; 2]) -> Result<Setup> {
        SetupConfig { incidence, ..self.config.clone() }.validate()
    }

    /// Lateral displacement in the detector plane of a ray travelling along
    /// the illumination direction. Reduces to `z·tanθᵢ` when the other
    /// angle is zero.
    pub fn carrier_displacement(&self) -> [f64; 2] {
        let s = self.incidence.map(f64::sin);
        let cz = (1.0 - s[0] * s[0] - s[1] * s[1]).max(f64::MIN_POSITIVE).sqrt();
        [self.distance * s[0] / cz, self.distance * s[1] / cz]
    }
}

impl Deref for Setup {
    type Target = SetupConfig;

    fn deref(&self) -> &SetupConfig {
        &self.config
    }
}

/// Dimension index helper: `0` is x₁, `1` is x₂.
pub type Dim = usize;
