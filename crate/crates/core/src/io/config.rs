//! TOML configuration with sections `setup`, `noise`, `coherence` and
//! `experiment`. Unknown keys are rejected.
//!
//! ```toml
//! [setup]
//! wavelength = "530nm"
//! refractive_index = 1.0
//! distance = "250um"
//! theta1 = "0deg"
//! detector_size = ["67.584um", "67.584um"]
//!
//! [noise]
//! snr_db = 20
//! ```

use serde::Deserialize;

use super::units::{format_angle, Angle, Length};
use crate::error::{Error, Result};
use crate::experiment::ExperimentPlan;
use crate::gauge::{GaugeOptions, SpatialCriterion};
use crate::model::{snr_db_to_eta, Setup, SetupConfig};
use crate::propagate::TransferKind;
use crate::scene::SceneKind;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    setup: RawSetup,
    #[serde(default)]
    noise: RawNoise,
    #[serde(default)]
    coherence: RawCoherence,
    #[serde(default)]
    experiment: RawExperiment,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetup {
    wavelength: Length,
    #[serde(default = "one")]
    refractive_index: f64,
    distance: Length,
    theta1: Option<Angle>,
    theta2: Option<Angle>,
    detector_size: [Length; 2],
    #[serde(default = "one")]
    mean_intensity: f64,
    /// Sample bandwidth as a fraction of k, enabling the paraxial FoV.
    sample_bandwidth_ratio: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    snr_db: Option<f64>,
    sigma: Option<f64>,
    quantization: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoherence {
    coherence_length: Option<Length>,
    source_angular_radius: Option<Angle>,
    spatial_criterion: Option<SpatialCriterion>,
    ensemble_size: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    scenes: Option<Vec<SceneKind>>,
    texture_correlation: Option<Length>,
    n_big: Option<usize>,
    n_rows: Option<usize>,
    pitch: Option<Length>,
    screen_distances: Option<Vec<Length>>,
    repetitions: Option<usize>,
    seed: Option<u64>,
    kernel: Option<TransferKind>,
    band_limit: Option<bool>,
}

/// Settings of the `propagate` command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub kind: TransferKind,
    pub band_limit: bool,
    pub pitch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub setup: Setup,
    pub gauge: GaugeOptions,
    pub plan: ExperimentPlan,
    pub propagation: PropagationConfig,
}

pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    let s = raw.setup;
    let mut config = SetupConfig::new(
        s.wavelength.0,
        s.refractive_index,
        s.distance.0,
        [s.detector_size[0].0, s.detector_size[1].0],
    );
    config.incidence = [s.theta1.map_or(0.0, |a| a.0), s.theta2.map_or(0.0, |a| a.0)];
    config.mean_intensity = s.mean_intensity;

    let n = raw.noise;
    config.noise_sigma = match (n.snr_db, n.sigma) {
        (Some(_), Some(_)) => return Err(Error::Config("give either noise.snr_db or noise.sigma, not both".into())),
        (Some(db), None) => snr_db_to_eta(db) * config.mean_intensity,
        (None, Some(sigma)) => sigma,
        (None, None) => 0.0,
    };
    config.quantization = n.quantization.unwrap_or(0.0);

    let c = raw.coherence;
    config.coherence_length = c.coherence_length.map(|l| l.0).filter(|l| l.is_finite());
    config.source_angular_radius = c.source_angular_radius.map_or(0.0, |a| a.0);
    let setup = config.validate()?;

    let gauge = GaugeOptions {
        spatial_criterion: c.spatial_criterion.unwrap_or_default(),
        sample_bandwidth: s.sample_bandwidth_ratio.map(|r| r * setup.wavenumber()),
    };

    let e = raw.experiment;
    let defaults = ExperimentPlan::default();
    let plan = ExperimentPlan {
        scenes: e.scenes.unwrap_or(defaults.scenes),
        texture_correlation: e.texture_correlation.map_or(defaults.texture_correlation, |l| l.0),
        n_big: e.n_big,
        n_rows: e.n_rows.unwrap_or(defaults.n_rows),
        pitch: e.pitch.map_or(defaults.pitch, |l| l.0),
        screen_distances: e.screen_distances.unwrap_or_default().into_iter().map(|l| l.0).collect(),
        repetitions: e.repetitions.unwrap_or(defaults.repetitions),
        ensemble_size: c.ensemble_size.unwrap_or(defaults.ensemble_size),
        seed: e.seed.unwrap_or(defaults.seed),
        spatial_criterion: gauge.spatial_criterion,
    };
    let propagation = PropagationConfig {
        kind: e.kernel.unwrap_or(TransferKind::ShiftedAngularSpectrum),
        band_limit: e.band_limit.unwrap_or(true),
        pitch: plan.pitch,
    };
    Ok(ParsedConfig { setup, gauge, plan, propagation })
}

/// Lossless config text for a setup: lengths in metres, angles in radians.
pub fn setup_to_config_text(config: &SetupConfig) -> String {
    let coherence = match config.coherence_length {
        Some(l) => format!("{l:?}"),
        None => "\"inf\"".to_string(),
    };
    format!(
        "[setup]\n\
         wavelength = {:?}\n\
         refractive_index = {:?}\n\
         distance = {:?}\n\
         theta1 = \"{}\"\n\
         theta2 = \"{}\"\n\
         detector_size = [{:?}, {:?}]\n\
         mean_intensity = {:?}\n\
         \n\
         [noise]\n\
         sigma = {:?}\n\
         quantization = {:?}\n\
         \n\
         [coherence]\n\
         coherence_length = {}\n\
         source_angular_radius = \"{}\"\n",
        config.wavelength,
        config.refractive_index,
        config.distance,
        format_angle(config.incidence[0]),
        format_angle(config.incidence[1]),
        config.detector_size[0],
        config.detector_size[1],
        config.mean_intensity,
        config.noise_sigma,
        config.quantization,
        coherence,
        format_angle(config.source_angular_radius),
    )
}
