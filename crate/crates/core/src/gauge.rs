//! Closed-form field-of-view and bandwidth bounds.
//!
//! Every half-width is measured from the centre of a diffraction pattern:
//! `left` is the extent toward −xᵢ (p⁻) and `right` toward +xᵢ (p⁺). An
//! inactive bound is `+∞` and drops out of [`combine`].

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dim, Setup};

/// Upper limit on the Fresnel validity margin `p²/(p²+z²) + sin|θ|`.
pub const FRESNEL_VALIDITY_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cause {
    Noise,
    SpectralCoherence,
    SpatialCoherence,
    Combined,
    /// The sampling-argument FoV capped the combined half-width.
    Theoretical,
}

impl fmt::Display for Cause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Cause::Noise => "noise",
            Cause::SpectralCoherence => "spectral",
            Cause::SpatialCoherence => "spatial",
            Cause::Combined => "combined",
            Cause::Theoretical => "theoretical",
        })
    }
}

/// Extent of a diffraction pattern on each side of its centre, one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfWidthPair {
    /// p⁻
    pub left: f64,
    /// p⁺
    pub right: f64,
    pub cause: Cause,
}

impl HalfWidthPair {
    pub fn new(left: f64, right: f64, cause: Cause) -> Self {
        debug_assert!(left >= 0.0 && right >= 0.0);
        HalfWidthPair { left, right, cause }
    }

    pub fn symmetric(p: f64, cause: Cause) -> Self {
        Self::new(p, p, cause)
    }

    pub fn inactive(cause: Cause) -> Self {
        Self::symmetric(f64::INFINITY, cause)
    }

    pub fn is_finite(&self) -> bool {
        self.left.is_finite() && self.right.is_finite()
    }

    pub fn max(&self) -> f64 {
        self.left.max(self.right)
    }
}

/// Coefficient of the spatial-coherence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpatialCriterion {
    /// Half width at half maximum of the coherence factor, 0.35.
    Hwhm,
    /// Radius of the coherence area, 1/π.
    #[default]
    CoherenceArea,
}

impl SpatialCriterion {
    pub fn coefficient(self) -> f64 {
        match self {
            SpatialCriterion::Hwhm => 0.35,
            SpatialCriterion::CoherenceArea => 1.0 / PI,
        }
    }
}

/// Smallest detectable relative intensity modulation, `max(σ, ζ)/I₀`.
pub fn threshold_eta(setup: &Setup) -> Result<f64> {
    if setup.noise_sigma <= 0.0 && setup.quantization <= 0.0 {
        return Err(Error::NoiseBoundUndefined);
    }
    Ok(setup.noise_sigma.max(setup.quantization) / setup.mean_intensity)
}

/// Distance from the shadow boundary beyond which knife-edge fringes fall
/// below the relative threshold `eta`.
pub fn noise_half_width(wavenumber: f64, distance: f64, theta: f64, eta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let a = wavenumber * PI * eta * eta;
    ((2.0 * distance * a * c + s * s).sqrt() + s.abs()) / (a * c * c)
}

pub fn half_width_noise(setup: &Setup, eta: f64) -> Result<[HalfWidthPair; 2]> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!("threshold η must be positive, got {eta}")));
    }
    let k = setup.wavenumber();
    Ok(setup
        .incidence
        .map(|t| HalfWidthPair::symmetric(noise_half_width(k, setup.distance, t, eta), Cause::Noise)))
}

/// `(p⁻, p⁺)`: lateral offsets where the optical path difference between the
/// diffracted and the illumination wave reaches `coherence_length`.
pub fn spectral_half_widths(coherence_length: f64, index: f64, distance: f64, theta: f64) -> (f64, f64) {
    if coherence_length.is_infinite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let (s, c) = theta.sin_cos();
    let scale = coherence_length / (index * c * c);
    let root = (1.0 + 2.0 * index * c * distance / coherence_length).sqrt();
    (scale * (root - s), scale * (root + s))
}

pub fn half_width_spectral(setup: &Setup) -> [HalfWidthPair; 2] {
    let lc = setup.coherence_length_or_inf();
    setup.incidence.map(|t| {
        let (left, right) = spectral_half_widths(lc, setup.refractive_index, setup.distance, t);
        HalfWidthPair::new(left, right, Cause::SpectralCoherence)
    })
}

pub fn half_width_spatial(setup: &Setup, criterion: SpatialCriterion) -> [HalfWidthPair; 2] {
    let alpha = setup.source_angular_radius;
    setup.incidence.map(|t| {
        if alpha == 0.0 {
            return HalfWidthPair::inactive(Cause::SpatialCoherence);
        }
        let p = criterion.coefficient() * setup.wavelength / (setup.refractive_index * alpha.tan() * t.cos());
        HalfWidthPair::symmetric(p, Cause::SpatialCoherence)
    })
}

/// Side-wise minimum over the supplied causes.
pub fn combine(pairs: &[HalfWidthPair]) -> Result<HalfWidthPair> {
    let left = pairs.iter().map(|p| p.left).fold(f64::INFINITY, f64::min);
    let right = pairs.iter().map(|p| p.right).fold(f64::INFINITY, f64::min);
    if left.is_infinite() && right.is_infinite() {
        return Err(Error::NoActiveBound);
    }
    Ok(HalfWidthPair::new(left, right, Cause::Combined))
}

/// `ℓ′ᵢ = ℓᵢ + p⁻ᵢ + p⁺ᵢ`.
pub fn field_of_view(detector: [f64; 2], combined: &[HalfWidthPair; 2]) -> Result<[f64; 2]> {
    if !combined.iter().all(HalfWidthPair::is_finite) {
        return Err(Error::InvalidArgument("field of view needs finite half-widths".into()));
    }
    Ok([0, 1].map(|i| detector[i] + combined[i].left + combined[i].right))
}

/// FoV at which the transfer function is sampled with less than π phase
/// change between neighbouring frequels.
pub fn theoretical_fov(setup: &Setup) -> Result<f64> {
    let n = setup.refractive_index;
    let r = setup.wavelength / setup.distance;
    if r >= n {
        return Err(Error::OutsideSamplingValidity);
    }
    // n − √(n² − r²) rewritten to avoid cancellation for r ≪ n
    let denom = r * r / (n + (n * n - r * r).sqrt());
    Ok(setup.wavelength / denom)
}

/// Paraxial FoV for a sample of angular bandwidth `sample_bandwidth`.
pub fn fresnel_fov(setup: &Setup, sample_bandwidth: f64) -> Result<[f64; 2]> {
    let k = setup.wavenumber();
    if !(sample_bandwidth > 0.0 && sample_bandwidth <= 2.0 * k) {
        return Err(Error::InvalidArgument(format!(
            "sample bandwidth must lie in (0, 2k], got {sample_bandwidth:e} rad/m"
        )));
    }
    Ok(setup.detector_size.map(|l| l + setup.distance * sample_bandwidth / k))
}

/// `x/√(x²+z²)`, with the ±∞ limits.
fn direction_cosine(x: f64, z: f64) -> f64 {
    if x.is_infinite() {
        x.signum()
    } else {
        x / x.hypot(z)
    }
}

/// Instantaneous angular frequency of the propagation kernel along `dim`,
/// evaluated on that axis.
pub fn instantaneous_frequency(x: f64, setup: &Setup, dim: Dim) -> f64 {
    setup.wavenumber() * (direction_cosine(x, setup.distance) - setup.incidence[dim].sin())
}

pub fn instantaneous_frequency_2d(x: [f64; 2], setup: &Setup) -> [f64; 2] {
    let r = (x[0] * x[0] + x[1] * x[1] + setup.distance * setup.distance).sqrt();
    [0, 1].map(|i| setup.wavenumber() * (x[i] / r - setup.incidence[i].sin()))
}

/// Centre of the FoV in the sample plane, `−z·tanθᵢ`.
pub fn fov_center(setup: &Setup) -> [f64; 2] {
    setup.incidence.map(|t| -setup.distance * t.tan())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandwidth {
    /// B′ᵢ in rad/m.
    pub bandwidth: f64,
    /// Rᵢ = 4π/B′ᵢ.
    pub resolution: f64,
    /// Δᵢ = Rᵢ/2.
    pub pixel_pitch: f64,
}

impl Bandwidth {
    fn from_bandwidth(bandwidth: f64) -> Self {
        let resolution = 4.0 * PI / bandwidth;
        Bandwidth { bandwidth, resolution, pixel_pitch: resolution / 2.0 }
    }
}

/// Effective bandwidth from the instantaneous frequency at the farthest
/// points of the pattern, clamped to the propagation limit 2k.
pub fn bandwidth_and_pitch(combined: &HalfWidthPair, setup: &Setup, dim: Dim) -> Bandwidth {
    let k = setup.wavenumber();
    let b = if combined.left == 0.0 && combined.right == 0.0 {
        let half = setup.detector_size[dim] / 2.0;
        let xc = fov_center(setup)[dim];
        let lo = instantaneous_frequency(-half - xc, setup, dim).abs();
        let hi = instantaneous_frequency(half - xc, setup, dim).abs();
        2.0 * lo.max(hi)
    } else {
        let lo = instantaneous_frequency(-combined.left, setup, dim).abs();
        let hi = instantaneous_frequency(combined.right, setup, dim).abs();
        2.0 * lo.max(hi)
    };
    Bandwidth::from_bandwidth(b.min(2.0 * k))
}

/// Resolution `(λ/n)·[p/√(p²+z²) + sin|θᵢ|]⁻¹` for a symmetric half-width `p`.
pub fn resolution_formula(p: f64, setup: &Setup, dim: Dim) -> f64 {
    setup.wavelength / setup.refractive_index
        / (direction_cosine(p, setup.distance) + setup.incidence[dim].sin().abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FresnelValidity {
    /// `p²/(p²+z²) + sin|θ|` with the largest half-width and incidence.
    pub margin: f64,
    pub valid: bool,
}

pub fn fresnel_validity(combined: &[HalfWidthPair; 2], setup: &Setup) -> FresnelValidity {
    let p = combined.iter().map(HalfWidthPair::max).fold(0.0, f64::max);
    let z = setup.distance;
    let geometric = if p.is_infinite() { 1.0 } else { p * p / (p * p + z * z) };
    let tilt = setup.incidence.iter().map(|t| t.sin().abs()).fold(0.0, f64::max);
    let margin = geometric + tilt;
    FresnelValidity { margin, valid: margin < FRESNEL_VALIDITY_THRESHOLD }
}

/// Numerical apertures (NA₁, NA₂) at sample-plane position `x`.
///
/// Constant across the FoV while every half-width is below half the
/// detector; otherwise position dependent, which is only modelled for
/// normal incidence on a square detector.
pub fn numerical_aperture(x: [f64; 2], combined: &[HalfWidthPair; 2], setup: &Setup) -> Result<[f64; 2]> {
    let n = setup.refractive_index;
    let z = setup.distance;
    let center = fov_center(setup);
    for i in 0..2 {
        let offset = x[i] - center[i];
        let half = setup.detector_size[i] / 2.0;
        if offset < -(half + combined[i].left) || offset > half + combined[i].right {
            return Err(Error::OutsideFov);
        }
    }
    let p = [combined[0].max(), combined[1].max()];
    if (0..2).all(|i| p[i] < setup.detector_size[i] / 2.0) {
        return Ok(p.map(|pi| n * pi / pi.hypot(z)));
    }
    let square = setup.detector_size[0] == setup.detector_size[1];
    let normal = setup.incidence == [0.0, 0.0];
    let symmetric = combined.iter().all(|c| c.left == c.right) && p[0] == p[1];
    if !(square && normal && symmetric) {
        return Err(Error::OutsideFormulaValidity(
            "position-dependent NA requires normal incidence, a square detector and symmetric half-widths",
        ));
    }
    let p = p[0];
    let half = setup.detector_size[0] / 2.0;
    let reach = [0, 1].map(|i| (x[i] - center[i]).abs() + half);
    let dist2 = (reach[0] * reach[0] + reach[1] * reach[1]).min(p * p);
    Ok(reach.map(|r| n * r.min(p) / (dist2 + z * z).sqrt()))
}

/// Axial two-point resolution `nλ / max(NA₁², NA₂²)`.
pub fn depth_resolution(na: [f64; 2], setup: &Setup) -> f64 {
    let na2 = (na[0] * na[0]).max(na[1] * na[1]);
    setup.refractive_index * setup.wavelength / na2
}

/// Options for [`GaugeReport::evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GaugeOptions {
    pub spatial_criterion: SpatialCriterion,
    /// Angular bandwidth B_s of the sample, enabling the paraxial FoV.
    pub sample_bandwidth: Option<f64>,
}

/// Which cause set p⁻ and p⁺ along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub left: Cause,
    pub right: Cause,
}

/// Every bound derived for one setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeReport {
    pub wavenumber: f64,
    pub eta: Option<f64>,
    pub noise: Option<[HalfWidthPair; 2]>,
    pub spectral: Option<[HalfWidthPair; 2]>,
    pub spatial: Option<[HalfWidthPair; 2]>,
    pub combined: [HalfWidthPair; 2],
    pub binding: [Binding; 2],
    pub fov: [f64; 2],
    pub fov_center: [f64; 2],
    pub bandwidth: [f64; 2],
    pub resolution: [f64; 2],
    pub max_pixel_pitch: [f64; 2],
    pub theoretical_fov: f64,
    pub fresnel_fov: Option<[f64; 2]>,
    pub fresnel_margin: f64,
    pub fresnel_valid: bool,
    pub na_center: Option<[f64; 2]>,
    pub na_edge: Option<[f64; 2]>,
    pub dz_center: Option<f64>,
    pub dz_edge: Option<f64>,
    pub warnings: Vec<String>,
}

impl GaugeReport {
    pub fn evaluate(setup: &Setup, options: &GaugeOptions) -> Result<GaugeReport> {
        let mut warnings = Vec::new();
        let eta = threshold_eta(setup).ok();
        let noise = eta.map(|e| half_width_noise(setup, e)).transpose()?;
        let spectral = setup.coherence_length.map(|_| half_width_spectral(setup));
        let spatial = (setup.source_angular_radius > 0.0)
            .then(|| half_width_spatial(setup, options.spatial_criterion));
        let theoretical_fov = theoretical_fov(setup)?;

        let mut combined = [HalfWidthPair::symmetric(0.0, Cause::Combined); 2];
        let mut binding = [Binding { left: Cause::Theoretical, right: Cause::Theoretical }; 2];
        for i in 0..2 {
            let active: Vec<HalfWidthPair> = [noise, spectral, spatial]
                .iter()
                .flatten()
                .map(|pairs| pairs[i])
                .filter(|p| p.left.is_finite() || p.right.is_finite())
                .collect();
            let cap = ((theoretical_fov - setup.detector_size[i]) / 2.0).max(0.0);
            let (mut pair, mut bind) = match combine(&active) {
                Ok(pair) => (pair, binding_of(&active)),
                Err(Error::NoActiveBound) => {
                    if i == 0 {
                        warnings.push("no active bound; theoretical FoV applies".to_string());
                    }
                    let inf = HalfWidthPair::inactive(Cause::Combined);
                    (inf, Binding { left: Cause::Theoretical, right: Cause::Theoretical })
                }
                Err(e) => return Err(e),
            };
            if pair.left > cap {
                pair.left = cap;
                bind.left = Cause::Theoretical;
            }
            if pair.right > cap {
                pair.right = cap;
                bind.right = Cause::Theoretical;
            }
            combined[i] = pair;
            binding[i] = bind;
        }

        let fov = field_of_view(setup.detector_size, &combined)?;
        let bw = [0, 1].map(|i| bandwidth_and_pitch(&combined[i], setup, i));
        let validity = fresnel_validity(&combined, setup);
        let fresnel_fov = options.sample_bandwidth.map(|b| fresnel_fov(setup, b)).transpose()?;

        let center = fov_center(setup);
        let edge = [center[0] + setup.detector_size[0] / 2.0 + combined[0].right, center[1]];
        let na_center = numerical_aperture(center, &combined, setup);
        let na_edge = numerical_aperture(edge, &combined, setup);
        if let Err(e) = &na_center {
            warnings.push(format!("numerical aperture not reported: {e}"));
        }
        let na_center = na_center.ok();
        let na_edge = na_edge.ok();

        Ok(GaugeReport {
            wavenumber: setup.wavenumber(),
            eta,
            noise,
            spectral,
            spatial,
            combined,
            binding,
            fov,
            fov_center: center,
            bandwidth: bw.map(|b| b.bandwidth),
            resolution: bw.map(|b| b.resolution),
            max_pixel_pitch: bw.map(|b| b.pixel_pitch),
            theoretical_fov,
            fresnel_fov,
            fresnel_margin: validity.margin,
            fresnel_valid: validity.valid,
            dz_center: na_center.map(|na| depth_resolution(na, setup)),
            dz_edge: na_edge.map(|na| depth_resolution(na, setup)),
            na_center,
            na_edge,
            warnings,
        })
    }
}

fn binding_of(active: &[HalfWidthPair]) -> Binding {
    let argmin = |side: fn(&HalfWidthPair) -> f64| {
        active
            .iter()
            .fold(None::<&HalfWidthPair>, |best, p| match best {
                Some(b) if side(b) <= side(p) => Some(b),
                _ => Some(p),
            })
            .map(|p| p.cause)
            .unwrap_or(Cause::Theoretical)
    };
    Binding { left: argmin(|p| p.left), right: argmin(|p| p.right) }
}

fn um(x: f64) -> String {
    format!("{:.1} µm", x * 1e6 + 0.0)
}

impl fmt::Display for GaugeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt_pair = |p: &Option<[HalfWidthPair; 2]>, i: usize| match p {
            Some(p) => format!("{:>12} {:>12}", um(p[i].left), um(p[i].right)),
            None => format!("{:>12} {:>12}", "-", "-"),
        };
        writeln!(f, "{:<22}{:>25} | {:>25}", "half-widths (p⁻ p⁺)", "axis 1", "axis 2")?;
        for (name, pairs) in [("noise", &self.noise), ("spectral", &self.spectral), ("spatial", &self.spatial)] {
            writeln!(f, "{:<22}{} | {}", name, opt_pair(pairs, 0), opt_pair(pairs, 1))?;
        }
        let c = &self.combined;
        writeln!(
            f,
            "{:<22}{:>12} {:>12} | {:>12} {:>12}",
            "combined",
            um(c[0].left),
            um(c[0].right),
            um(c[1].left),
            um(c[1].right)
        )?;
        let b = &self.binding;
        writeln!(
            f,
            "{:<22}{:>12} {:>12} | {:>12} {:>12}",
            "binding cause", b[0].left, b[0].right, b[1].left, b[1].right
        )?;
        writeln!(f)?;
        writeln!(f, "{:<22}{:.3} mm x {:.3} mm", "field of view", self.fov[0] * 1e3, self.fov[1] * 1e3)?;
        writeln!(f, "{:<22}{} , {}", "fov center", um(self.fov_center[0]), um(self.fov_center[1]))?;
        writeln!(f, "{:<22}{:.4e} , {:.4e} rad/m", "bandwidth", self.bandwidth[0], self.bandwidth[1])?;
        writeln!(
            f,
            "{:<22}{:.1} nm , {:.1} nm",
            "resolution",
            self.resolution[0] * 1e9,
            self.resolution[1] * 1e9
        )?;
        writeln!(
            f,
            "{:<22}{:.1} nm , {:.1} nm",
            "max pixel pitch",
            self.max_pixel_pitch[0] * 1e9,
            self.max_pixel_pitch[1] * 1e9
        )?;
        writeln!(f, "{:<22}{:.4} m", "theoretical fov", self.theoretical_fov)?;
        if let Some(ff) = self.fresnel_fov {
            writeln!(f, "{:<22}{:.3} mm x {:.3} mm", "fresnel fov", ff[0] * 1e3, ff[1] * 1e3)?;
        }
        writeln!(
            f,
            "{:<22}{:.4} ({})",
            "fresnel margin",
            self.fresnel_margin,
            if self.fresnel_valid { "valid" } else { "invalid" }
        )?;
        if let (Some(na), Some(dz)) = (self.na_center, self.dz_center) {
            writeln!(f, "{:<22}{:.4} , {:.4} (d_z {})", "NA at center", na[0], na[1], um(dz))?;
        }
        if let (Some(na), Some(dz)) = (self.na_edge, self.dz_edge) {
            writeln!(f, "{:<22}{:.4} , {:.4} (d_z {})", "NA at edge", na[0], na[1], um(dz))?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SetupConfig;
    use proptest::prelude::*;

    const UM: f64 = 1e-6;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    fn desk(theta: f64) -> Setup {
        SetupConfig::new(530e-9, 1.0, 250e-6, [67.584e-6; 2])
            .with_incidence(deg(theta), 0.0)
            .validate()
            .unwrap()
    }

    fn long_range() -> SetupConfig {
        SetupConfig::new(681e-9, 1.0, 1.02e-3, [5.3e-3, 5.3e-3]).with_incidence(deg(9.0), 0.0)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eta_rules() {
        let s = SetupConfig::new(530e-9, 1.0, 250e-6, [1e-3; 2]);
        assert!(matches!(threshold_eta(&s.clone().validate().unwrap()), Err(Error::NoiseBoundUndefined)));
        let e = threshold_eta(&s.clone().with_noise_sigma(0.1).validate().unwrap()).unwrap();
        assert_eq!(e, 0.1);
        let e = threshold_eta(&s.clone().with_snr_db(20.0).validate().unwrap()).unwrap();
        assert!(close(e, 0.1, 1e-15));
        let e = threshold_eta(&s.with_noise_sigma(0.02).with_quantization(0.05).validate().unwrap()).unwrap();
        assert_eq!(e, 0.05);
    }

    #[test]
    fn noise_examples() {
        let p0 = half_width_noise(&desk(0.0), 0.1).unwrap();
        assert!(close(p0[0].left, 36.64 * UM, 0.01 * UM), "{}", p0[0].left);
        assert_eq!(p0[0].left, p0[0].right);
        let p45 = half_width_noise(&desk(45.0), 0.1).unwrap();
        assert!(close(p45[0].left, 65.5 * UM, 0.05 * UM), "{}", p45[0].left);
        let r = half_width_noise(&long_range().validate().unwrap(), 1e-2).unwrap();
        assert!(close(r[0].left, 911.7 * UM, 0.2 * UM), "{}", r[0].left);
    }

    #[test]
    fn spectral_examples() {
        let s = long_range().with_coherence_length(1e-3).validate().unwrap();
        let p = half_width_spectral(&s)[0];
        assert!(close(p.right, 1.94e-3, 0.005e-3), "{}", p.right);
        assert!(close(p.left, 1.62e-3, 0.005e-3), "{}", p.left);
        let s = desk(-30.0).with_incidence([deg(-30.0), 0.0]).unwrap();
        let s = SetupConfig { coherence_length: Some(2e-6), ..s.config().clone() }.validate().unwrap();
        let p = half_width_spectral(&s)[0];
        assert!(close(p.right, 38.0 * UM, 0.05 * UM), "{}", p.right);
        // θ₂ = 0
        let q = half_width_spectral(&s)[1];
        assert_eq!(q.left, q.right);
    }

    #[test]
    fn spectral_inactive_when_monochromatic() {
        let p = half_width_spectral(&desk(10.0));
        assert!(p.iter().all(|p| p.left.is_infinite() && p.right.is_infinite()));
    }

    #[test]
    fn spatial_examples() {
        let at = |alpha: f64, theta: f64, c: SpatialCriterion| {
            let s = desk(theta);
            let s = SetupConfig { source_angular_radius: deg(alpha), ..s.config().clone() }.validate().unwrap();
            half_width_spatial(&s, c)[0].left
        };
        assert!(close(at(0.07, -30.0, SpatialCriterion::CoherenceArea), 159.448 * UM, 0.01 * UM));
        assert!(close(at(0.2, -30.0, SpatialCriterion::CoherenceArea), 55.807 * UM, 0.01 * UM));
        assert!(close(at(0.2, 0.0, SpatialCriterion::Hwhm), 53.142 * UM, 0.01 * UM));
        assert!(half_width_spatial(&desk(0.0), SpatialCriterion::Hwhm)[0].left.is_infinite());
    }

    #[test]
    fn combine_examples() {
        let inf = HalfWidthPair::inactive(Cause::SpectralCoherence);
        let c = combine(&[HalfWidthPair::symmetric(37.0, Cause::Noise), inf]).unwrap();
        assert_eq!((c.left, c.right, c.cause), (37.0, 37.0, Cause::Combined));
        let c = combine(&[
            HalfWidthPair::new(38.0, 52.0, Cause::SpectralCoherence),
            HalfWidthPair::symmetric(30.0, Cause::SpatialCoherence),
        ])
        .unwrap();
        assert_eq!((c.left, c.right), (30.0, 30.0));
        let c = combine(&[
            HalfWidthPair::symmetric(911.7, Cause::Noise),
            HalfWidthPair::new(1620.0, 1940.0, Cause::SpectralCoherence),
        ])
        .unwrap();
        assert_eq!((c.left, c.right), (911.7, 911.7));
        assert!(matches!(combine(&[inf, inf]), Err(Error::NoActiveBound)));
        assert!(matches!(combine(&[]), Err(Error::NoActiveBound)));
    }

    #[test]
    fn fov_examples() {
        let p = [HalfWidthPair::symmetric(911.7 * UM, Cause::Combined); 2];
        let f = field_of_view([5.3e-3; 2], &p).unwrap();
        assert!(close(f[0], 7.1234e-3, 1e-9));
        let p = [HalfWidthPair::new(1.62e-3, 1.94e-3, Cause::Combined); 2];
        assert!(close(field_of_view([5.3e-3; 2], &p).unwrap()[0], 8.86e-3, 1e-12));
        let p = [HalfWidthPair::symmetric(0.0, Cause::Combined); 2];
        assert_eq!(field_of_view([5.3e-3, 1e-3], &p).unwrap(), [5.3e-3, 1e-3]);
    }

    #[test]
    fn theoretical_fov_examples() {
        let r = long_range().validate().unwrap();
        assert!(close(theoretical_fov(&r).unwrap(), 3.0555, 1e-3));
        let t = theoretical_fov(&desk(0.0)).unwrap();
        assert!(close(t, 0.2358, 1e-4), "{t}");
        let approx = 2.0 * 250e-6f64.powi(2) / 530e-9;
        assert!((t - approx).abs() / approx < 1e-3);
    }

    #[test]
    fn fresnel_fov_examples() {
        let s = SetupConfig::new(530e-9, 1.0, 1e-3, [5e-3; 2]).validate().unwrap();
        let k = s.wavenumber();
        assert!(close(fresnel_fov(&s, k / 2.0).unwrap()[0], 5.5e-3, 1e-15));
        assert!(close(fresnel_fov(&s, 1e-9 * k).unwrap()[0], 5e-3, 1e-11));
        let s = SetupConfig::new(530e-9, 1.0, 0.25, [8.6e-3; 2]).validate().unwrap();
        assert!(close(fresnel_fov(&s, 0.01 * s.wavenumber()).unwrap()[0], 11.1e-3, 1e-15));
        assert!(fresnel_fov(&s, 3.0 * s.wavenumber()).is_err());
    }

    #[test]
    fn instantaneous_frequency_examples() {
        let s = desk(0.0);
        assert_eq!(instantaneous_frequency(0.0, &s, 0), 0.0);
        assert!(close(instantaneous_frequency(250e-6, &s, 0), 8.38280e6, 1e2));
        let s = desk(30.0);
        assert!(close(instantaneous_frequency(0.0, &s, 0), -5.92753e6, 1e2));
    }

    #[test]
    fn fov_center_examples() {
        assert_eq!(fov_center(&desk(0.0)), [0.0, 0.0]);
        assert!(close(fov_center(&desk(30.0))[0], -144.34 * UM, 0.01 * UM));
        let s = SetupConfig::new(530e-9, 1.0, 1e-3, [5e-3; 2]).with_incidence(deg(-45.0), 0.0);
        assert!(close(fov_center(&s.validate().unwrap())[0], 1e-3, 1e-15));
    }

    #[test]
    fn bandwidth_examples() {
        let r = long_range().validate().unwrap();
        let b = bandwidth_and_pitch(&HalfWidthPair::symmetric(911.7 * UM, Cause::Combined), &r, 0);
        assert!(close(b.resolution, 827.6e-9, 0.2e-9), "{}", b.resolution);
        assert!(close(b.pixel_pitch, 413.8e-9, 0.1e-9), "{}", b.pixel_pitch);

        let n0 = SetupConfig::new(681e-9, 1.0, 1.02e-3, [5.3e-3; 2]).validate().unwrap();
        let b = bandwidth_and_pitch(&HalfWidthPair::inactive(Cause::Combined), &n0, 0);
        assert!(close(b.pixel_pitch, 340.5e-9, 1e-15));

        let b = bandwidth_and_pitch(&HalfWidthPair::symmetric(36.6 * UM, Cause::Combined), &desk(0.0), 0);
        assert!(close(b.bandwidth, 3.4346e6, 2e2), "{}", b.bandwidth);
        assert!(close(b.pixel_pitch, 1.829e-6, 0.001e-6), "{}", b.pixel_pitch);
    }

    #[test]
    fn bandwidth_zero_half_width_uses_detector_edges() {
        let s = desk(0.0);
        let b = bandwidth_and_pitch(&HalfWidthPair::symmetric(0.0, Cause::Combined), &s, 0);
        let expect = 2.0 * instantaneous_frequency(67.584e-6 / 2.0, &s, 0);
        assert!(close(b.bandwidth, expect, 1e-6));
        assert!(b.bandwidth > 0.0);
    }

    #[test]
    fn fresnel_validity_examples() {
        let v = fresnel_validity(&[HalfWidthPair::symmetric(36.6 * UM, Cause::Combined); 2], &desk(0.0));
        assert!(close(v.margin, 0.020985, 1e-5), "{}", v.margin);
        assert!(v.valid);
        let v = fresnel_validity(&[HalfWidthPair::symmetric(1e-9, Cause::Combined); 2], &desk(45.0));
        assert!(v.margin >= 0.707 && !v.valid);
        let v = fresnel_validity(&[HalfWidthPair::symmetric(0.0, Cause::Combined); 2], &desk(0.0));
        assert_eq!(v.margin, 0.0);
        assert!(v.valid);
    }

    #[test]
    fn numerical_aperture_examples() {
        let s = SetupConfig::new(530e-9, 1.0, 250e-6, [200e-6; 2]).validate().unwrap();
        let p = [HalfWidthPair::symmetric(36.6 * UM, Cause::Combined); 2];
        let na = numerical_aperture([0.0, 0.0], &p, &s).unwrap();
        assert!(close(na[0], 0.14486, 1e-4), "{}", na[0]);
        let dz = depth_resolution(na, &s);
        assert!(close(dz, 25.26e-6, 0.02e-6), "{dz}");

        let s = SetupConfig::new(530e-9, 1.0, 250e-6, [1e-3; 2]).validate().unwrap();
        let p = [HalfWidthPair::symmetric(250e-6, Cause::Combined); 2];
        let na = numerical_aperture([0.0, 0.0], &p, &s).unwrap();
        assert!(close(na[0], 1.0 / 2f64.sqrt(), 1e-12));

        assert!(close(depth_resolution([0.5, 0.1], &s), 2.12e-6, 1e-15));
    }

    #[test]
    fn numerical_aperture_position_dependent() {
        let s = SetupConfig::new(530e-9, 1.0, 250e-6, [40e-6; 2]).validate().unwrap();
        let p = [HalfWidthPair::symmetric(100e-6, Cause::Combined); 2];
        let center = numerical_aperture([0.0, 0.0], &p, &s).unwrap();
        let edge = numerical_aperture([110e-6, 0.0], &p, &s).unwrap();
        assert!(edge[0] > center[0]);
        assert!(matches!(numerical_aperture([200e-6, 0.0], &p, &s), Err(Error::OutsideFov)));
        let tilted = s.with_incidence([0.1, 0.0]).unwrap();
        assert!(numerical_aperture(fov_center(&tilted), &p, &tilted).is_err());
    }

    #[test]
    fn report_long_range_noise() {
        let s = long_range().with_noise_sigma(1e-2).validate().unwrap();
        let r = GaugeReport::evaluate(&s, &GaugeOptions::default()).unwrap();
        assert!(close(r.fov[0], 7.12e-3, 0.01e-3), "{}", r.fov[0]);
        assert_eq!(r.binding[0].left, Cause::Noise);
        assert_eq!(r.binding[0].right, Cause::Noise);
        assert!(r.warnings.is_empty() || r.na_center.is_none());
    }

    #[test]
    fn report_long_range_spectral() {
        let s = long_range().with_coherence_length(1e-3).validate().unwrap();
        let r = GaugeReport::evaluate(&s, &GaugeOptions::default()).unwrap();
        assert!(close(r.fov[0], 8.86e-3, 0.01e-3), "{}", r.fov[0]);
        assert_eq!(r.binding[0].left, Cause::SpectralCoherence);
        assert!(r.noise.is_none());
    }

    #[test]
    fn report_without_bounds_falls_back_to_theoretical() {
        let s = long_range().validate().unwrap();
        let r = GaugeReport::evaluate(&s, &GaugeOptions::default()).unwrap();
        assert!(close(r.fov[0], r.theoretical_fov, 1e-9));
        assert!(!r.warnings.is_empty());
        assert_eq!(r.binding[0].left, Cause::Theoretical);
    }

    #[test]
    fn report_json_round_trip() {
        let s = long_range().with_noise_sigma(1e-2).with_coherence_length(1e-3).validate().unwrap();
        let opts = GaugeOptions { sample_bandwidth: Some(1e5), ..Default::default() };
        let r = GaugeReport::evaluate(&s, &opts).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: GaugeReport = serde_json::from_str(&text).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn table_flags_binding_cause() {
        let s = long_range().with_noise_sigma(1e-2).validate().unwrap();
        let t = GaugeReport::evaluate(&s, &GaugeOptions::default()).unwrap().to_string();
        assert!(t.contains("binding cause"));
        assert!(t.contains("noise"));
    }

    fn any_setup() -> impl Strategy<Value = (f64, f64, f64)> {
        (300e-9f64..1e-6, 50e-6f64..0.1, -1.2f64..1.2)
    }

    proptest! {
        #[test]
        fn noise_monotone((lambda, z, theta) in any_setup(), eta in 1e-3f64..0.5) {
            let k = 2.0 * PI / lambda;
            let p = noise_half_width(k, z, theta, eta);
            prop_assert!(noise_half_width(k, z, theta, eta * 1.01) < p);
            prop_assert!(noise_half_width(k, z * 1.01, theta, eta) > p);
            prop_assert_eq!(p, noise_half_width(k, z, -theta, eta));
        }

        #[test]
        fn spectral_mirror((_l, z, theta) in any_setup(), lc in 1e-7f64..1e-2) {
            let (l, r) = spectral_half_widths(lc, 1.0, z, theta);
            let (ml, mr) = spectral_half_widths(lc, 1.0, z, -theta);
            prop_assert_eq!(r, ml);
            prop_assert_eq!(l, mr);
            let (l2, r2) = spectral_half_widths(lc * 1.01, 1.0, z, theta);
            prop_assert!(l2 > l && r2 > r);
        }

        #[test]
        fn spatial_decreasing((lambda, z, theta) in any_setup(), alpha in 1e-4f64..0.5) {
            let mk = |a: f64| {
                let s = SetupConfig::new(lambda, 1.0, z.max(11.0 * lambda), [1e-3; 2])
                    .with_incidence(theta, 0.0)
                    .with_source_radius(a)
                    .validate()
                    .unwrap();
                half_width_spatial(&s, SpatialCriterion::CoherenceArea)[0]
            };
            let p = mk(alpha);
            prop_assert!(mk(alpha * 1.01).left < p.left);
            prop_assert_eq!(p.left, p.right);
        }

        #[test]
        fn bandwidth_consistency((lambda, z, theta) in any_setup(), p in 1e-7f64..1e-2) {
            let s = SetupConfig::new(lambda, 1.0, z, [1e-3; 2]).with_incidence(theta, 0.0).validate().unwrap();
            let b = bandwidth_and_pitch(&HalfWidthPair::symmetric(p, Cause::Combined), &s, 0);
            prop_assert!(b.bandwidth > 0.0 && b.bandwidth <= 2.0 * s.wavenumber());
            prop_assert!((b.resolution * b.bandwidth - 4.0 * PI).abs() < 1e-12);
            if b.bandwidth < 2.0 * s.wavenumber() {
                let r = resolution_formula(p, &s, 0);
                prop_assert!((r - b.resolution).abs() / r < 1e-12);
            }
        }

        #[test]
        fn unit_scale_invariance((lambda, z, theta) in any_setup(), eta in 1e-3f64..0.5, lc in 1e-6f64..1e-3) {
            // lengths expressed in micrometres instead of metres
            let f = 1e6;
            let k = 2.0 * PI / lambda;
            let p_m = noise_half_width(k, z, theta, eta);
            let p_um = noise_half_width(k / f, z * f, theta, eta) / f;
            prop_assert!((p_m - p_um).abs() / p_m < 1e-12);
            let (l_m, r_m) = spectral_half_widths(lc, 1.0, z, theta);
            let (l_u, r_u) = spectral_half_widths(lc * f, 1.0, z * f, theta);
            prop_assert!((l_m - l_u / f).abs() / l_m < 1e-12);
            prop_assert!((r_m - r_u / f).abs() / r_m < 1e-12);
        }
    }

    /// Simpson quadrature of ξ(x+ℓ/2) − ξ(x−ℓ/2) over a wide window.
    #[test]
    fn degrees_of_freedom_integral() {
        let s = desk(20.0);
        let ell = 67.584e-6;
        let half = 2000.0 * s.distance;
        let n = 400_000;
        let h = 2.0 * half / n as f64;
        let g = |x: f64| instantaneous_frequency(x + ell / 2.0, &s, 0) - instantaneous_frequency(x - ell / 2.0, &s, 0);
        let mut sum = g(-half) + g(half);
        for i in 1..n {
            let x = -half + i as f64 * h;
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * g(x);
        }
        let integral = sum * h / 3.0;
        let expect = 2.0 * s.wavenumber() * ell;
        assert!((integral - expect).abs() / expect < 1e-3, "{integral} vs {expect}");
    }
}
