//! Masked-screen modelling-error experiments.
//!
//! A reference hologram `r` of a wide scene (with noise and/or partial
//! coherence) is compared to clean coherent holograms `s(t)` of the same
//! scene cut by an opaque screen at projected distance `t` left of the
//! detector. `E(t) = 10·log₁₀(‖r − s(t)‖² / ‖r − s_∞‖²)`.
//!
//! Simulations run on strip grids: `n_big` samples along x₁ by `n_rows`
//! along x₂. The sample grid is centred on the detector centre projected
//! back along the illumination, and the output window follows the carrier
//! so that the detector always sits at the centre of the output grid.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coherence::{ensemble_members, mc_average_intensity, member_intensity, CoherenceSpec, EnsembleMember, SimulationWindow};
use crate::error::{Error, Result};
use crate::field::{ComplexField, Grid};
use crate::gauge::{half_width_noise, half_width_spatial, half_width_spectral, threshold_eta, SpatialCriterion};
use crate::model::{Setup, SetupConfig};
use crate::propagate::{detector_samples, TransferOptions};
use crate::rng::{substream, substream_seed, Domain};
use crate::scene::{make_scene, mask_screen, scene_for_repetition, SceneKind, SceneSpec, DEFAULT_TEXTURE_CORRELATION};

pub const DEFAULT_N_BIG: usize = 4096;
pub const DEFAULT_N_ROWS: usize = 64;
pub const DEFAULT_PITCH: f64 = 132e-9;
pub const DEFAULT_REPETITIONS: usize = 20;
pub const DEFAULT_ENSEMBLE: usize = 100;

/// Level below which the error curve counts as having reached its knee.
pub const KNEE_DB: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    /// Scene kinds cycled over repetitions.
    pub scenes: Vec<SceneKind>,
    pub texture_correlation: f64,
    /// Grid length along x₁; `None` picks the smallest power of two ≥ 4096
    /// meeting the wrap-around margin.
    pub n_big: Option<usize>,
    pub n_rows: usize,
    pub pitch: f64,
    /// Screen distances; empty selects an automatic sweep.
    pub screen_distances: Vec<f64>,
    pub repetitions: usize,
    pub ensemble_size: usize,
    pub seed: u64,
    pub spatial_criterion: SpatialCriterion,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            scenes: SceneKind::ALL.to_vec(),
            texture_correlation: DEFAULT_TEXTURE_CORRELATION,
            n_big: None,
            n_rows: DEFAULT_N_ROWS,
            pitch: DEFAULT_PITCH,
            screen_distances: Vec::new(),
            repetitions: DEFAULT_REPETITIONS,
            ensemble_size: DEFAULT_ENSEMBLE,
            seed: 0,
            spatial_criterion: SpatialCriterion::CoherenceArea,
        }
    }
}

/// Predicted half-width for each active cause, as seen by a screen
/// approaching from −x₁.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundMark {
    pub cause: String,
    pub half_width: f64,
}

pub fn screen_bounds(setup: &Setup, criterion: SpatialCriterion) -> Vec<BoundMark> {
    let mut marks = Vec::new();
    if let Ok(eta) = threshold_eta(setup) {
        if let Ok(p) = half_width_noise(setup, eta) {
            marks.push(BoundMark { cause: "noise".into(), half_width: p[0].right });
        }
    }
    if setup.coherence_length.is_some() {
        marks.push(BoundMark { cause: "spectral".into(), half_width: half_width_spectral(setup)[0].right });
    }
    if setup.source_angular_radius > 0.0 {
        marks.push(BoundMark { cause: "spatial".into(), half_width: half_width_spatial(setup, criterion)[0].right });
    }
    if let Some(min) = marks.iter().map(|m| m.half_width).reduce(f64::min) {
        marks.push(BoundMark { cause: "combined".into(), half_width: min });
    }
    marks
}

/// Grid sizes and geometry resolved from a plan and setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedPlan {
    pub n_big: usize,
    pub n_rows: usize,
    pub n_det: usize,
    pub pitch: f64,
    pub screen_distances: Vec<f64>,
    pub carrier_shift: [f64; 2],
    pub bound_marks: Vec<BoundMark>,
}

impl ResolvedPlan {
    pub fn detector(&self) -> [f64; 2] {
        [self.n_det as f64 * self.pitch, self.n_rows as f64 * self.pitch]
    }

    pub fn sample_grid(&self) -> Grid {
        let d = self.carrier_shift;
        let origin = [
            -((self.n_big / 2) as f64) * self.pitch - d[0],
            -((self.n_rows / 2) as f64) * self.pitch - d[1],
        ];
        Grid { n1: self.n_big, n2: self.n_rows, pitch: self.pitch, origin }
    }

    pub fn window(&self) -> SimulationWindow {
        SimulationWindow {
            detector: self.detector(),
            options: TransferOptions { band_limit: true, output_shift: self.carrier_shift },
        }
    }
}

impl ExperimentPlan {
    pub fn resolve(&self, setup: &Setup) -> Result<ResolvedPlan> {
        if self.scenes.is_empty() {
            return Err(Error::InvalidArgument("at least one scene kind is required".into()));
        }
        if self.repetitions == 0 || self.ensemble_size == 0 || self.n_rows == 0 {
            return Err(Error::InvalidArgument("repetitions, ensemble size and rows must be positive".into()));
        }
        let quarter = setup.wavelength / (4.0 * setup.refractive_index);
        if !(self.pitch > 0.0 && self.pitch <= quarter * (1.0 + 1e-9)) {
            return Err(Error::InvalidArgument(format!(
                "simulation pitch {:e} m must lie in (0, λ/(4n)] = (0, {quarter:e}] m",
                self.pitch
            )));
        }
        if self.screen_distances.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::InvalidArgument("screen distances must be finite and non-negative".into()));
        }
        let n_det = detector_samples(setup.detector_size[0], self.pitch, usize::MAX)?;
        let bound_marks = screen_bounds(setup, self.spatial_criterion);
        let p_max = bound_marks.iter().map(|m| m.half_width).fold(0.0, f64::max);
        let mut ts = self.screen_distances.clone();
        if ts.is_empty() {
            let p = bound_marks.last().map(|m| m.half_width).ok_or_else(|| {
                Error::InvalidArgument("no active bound; give screen distances explicitly".into())
            })?;
            ts = (0..=30).map(|i| i as f64 * p / 6.0).collect();
        }
        ts.sort_by(|a, b| a.total_cmp(b));
        ts.dedup();
        let t_max = *ts.last().expect("non-empty");
        let needed = n_det as f64 * self.pitch + 2.0 * t_max + 2.0 * p_max;
        let n_big = match self.n_big {
            Some(n) => {
                if (n as f64) * self.pitch < needed {
                    log::warn!(
                        "grid {n} x {:e} m is below the wrap-around margin {needed:e} m",
                        self.pitch
                    );
                }
                if n < n_det {
                    return Err(Error::DetectorLargerThanGrid);
                }
                n
            }
            None => {
                let min = (needed / self.pitch).ceil() as usize;
                min.next_power_of_two().max(DEFAULT_N_BIG)
            }
        };
        Ok(ResolvedPlan {
            n_big,
            n_rows: self.n_rows,
            n_det,
            pitch: self.pitch,
            screen_distances: ts,
            carrier_shift: setup.carrier_displacement(),
            bound_marks,
        })
    }

    fn scene(&self, resolved: &ResolvedPlan, setup: &Setup, rep: usize) -> ComplexField {
        let spec = SceneSpec {
            kind: scene_for_repetition(&self.scenes, rep),
            texture_correlation: self.texture_correlation,
        };
        let seed = substream_seed(self.seed, Domain::Scene, rep as u64);
        make_scene(&spec, seed, &resolved.sample_grid(), setup.wavelength, setup.refractive_index)
    }

    fn members(&self, setup: &Setup, rep: usize) -> Result<Vec<EnsembleMember>> {
        let seed = substream_seed(self.seed, Domain::Temporal, rep as u64);
        ensemble_members(&CoherenceSpec::from_setup(setup, self.ensemble_size, seed)?)
    }
}

/// Clean coherent hologram at the nominal wavelength and incidence.
fn coherent(scene: &ComplexField, setup: &Setup, resolved: &ResolvedPlan) -> Result<Array2<f64>> {
    let member = EnsembleMember { wavelength: setup.wavelength, incidence: setup.incidence };
    let img = member_intensity(scene, &member, setup, &resolved.window())?;
    Ok(img * setup.mean_intensity)
}

/// Reference intensity for repetition `rep`: partially coherent average
/// when coherence effects are active, plus Gaussian noise of std `η·I₀`
/// when a noise level is set.
pub fn reference_intensity(
    plan: &ExperimentPlan,
    resolved: &ResolvedPlan,
    setup: &Setup,
    scene: &ComplexField,
    rep: usize,
) -> Result<Array2<f64>> {
    let members = plan.members(setup, rep)?;
    let mut r = if members.len() == 1 && members[0].wavelength == setup.wavelength && members[0].incidence == setup.incidence {
        coherent(scene, setup, resolved)?
    } else {
        mc_average_intensity(scene, &members, setup, &resolved.window())? * setup.mean_intensity
    };
    add_detector_noise(&mut r, setup, plan.seed, rep as u64);
    Ok(r)
}

/// Adds Gaussian noise of std `η·I₀` from stream `(seed, index)`; no-op
/// without a noise level.
pub fn add_detector_noise(image: &mut Array2<f64>, setup: &Setup, seed: u64, index: u64) {
    if let Ok(eta) = threshold_eta(setup) {
        let sigma = eta * setup.mean_intensity;
        let mut rng = substream(seed, Domain::Noise, index);
        image.iter_mut().for_each(|v| *v += sigma * rng.sample::<f64, _>(StandardNormal));
    }
}

fn sq_dist(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub e_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub setup_digest: String,
    pub plan_digest: String,
    pub n_big: usize,
    pub n_rows: usize,
    pub n_det: usize,
    pub pitch: f64,
    pub seed: u64,
    pub ensemble_size: usize,
    pub repetitions: usize,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub points: Vec<CurvePoint>,
    pub bound_marks: Vec<BoundMark>,
    pub metadata: CurveMetadata,
}

impl ErrorCurve {
    /// First `t` with `E < threshold`.
    pub fn knee(&self, threshold: f64) -> Option<f64> {
        self.points.iter().find(|p| p.e_db < threshold).map(|p| p.t)
    }

    /// Linear interpolation of E at `t`, clamped to the sampled range.
    pub fn value_at(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= pts[0].t {
            return pts[0].e_db;
        }
        for w in pts.windows(2) {
            if t <= w[1].t {
                let f = (t - w[0].t) / (w[1].t - w[0].t);
                return w[0].e_db + f * (w[1].e_db - w[0].e_db);
            }
        }
        pts[pts.len() - 1].e_db
    }

    /// Three-point moving average of E (endpoints use two points).
    pub fn smoothed(&self) -> Vec<f64> {
        let e: Vec<f64> = self.points.iter().map(|p| p.e_db).collect();
        (0..e.len())
            .map(|i| {
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(e.len() - 1);
                e[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
            })
            .collect()
    }

    /// Largest increase between consecutive smoothed values.
    pub fn max_smoothed_rise(&self) -> f64 {
        self.smoothed().windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn bound(&self, cause: &str) -> Option<f64> {
        self.bound_marks.iter().find(|m| m.cause == cause).map(|m| m.half_width)
    }
}

/// SHA-256 of the JSON form of `value`.
pub fn digest<T: Serialize>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    let hash = Sha256::digest(&bytes);
    Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
}

/// Per-repetition E(t) in dB.
fn repetition_errors(plan: &ExperimentPlan, resolved: &ResolvedPlan, setup: &Setup, rep: usize) -> Result<Vec<f64>> {
    scene_errors(plan, resolved, setup, &plan.scene(resolved, setup, rep), rep)
}

/// E(t) in dB at every resolved screen distance for a given scene, which
/// must live on `resolved.sample_grid()`. `rep` selects the noise and
/// ensemble streams.
pub fn scene_errors(
    plan: &ExperimentPlan,
    resolved: &ResolvedPlan,
    setup: &Setup,
    scene: &ComplexField,
    rep: usize,
) -> Result<Vec<f64>> {
    let s_inf = coherent(scene, setup, resolved)?;
    let r = reference_intensity(plan, resolved, setup, scene, rep)?;
    let den = sq_dist(&r, &s_inf);
    if den == 0.0 {
        return Err(Error::UndefinedErrorCurve("reference equals the untruncated model"));
    }
    let width = setup.detector_size[0];
    let shift = resolved.carrier_shift[0];
    resolved
        .screen_distances
        .par_iter()
        .map(|&t| {
            let mut masked = scene.clone();
            let s_t = if mask_screen(&mut masked, t, width, shift) {
                coherent(&masked, setup, resolved)?
            } else {
                s_inf.clone()
            };
            let num = sq_dist(&r, &s_t);
            if num == 0.0 {
                return Err(Error::UndefinedErrorCurve("truncated model matches the reference exactly"));
            }
            Ok(10.0 * (num / den).log10())
        })
        .collect()
}

/// Sweeps the screen and averages E(t) in dB over repetitions.
pub fn error_curve(plan: &ExperimentPlan, setup: &Setup) -> Result<ErrorCurve> {
    let resolved = plan.resolve(setup)?;
    log::info!(
        "experiment grid {} x {} @ {:e} m, detector {} samples, {} screen positions, {} repetitions",
        resolved.n_big,
        resolved.n_rows,
        resolved.pitch,
        resolved.n_det,
        resolved.screen_distances.len(),
        plan.repetitions
    );
    let per_rep: Vec<Result<Vec<f64>>> = (0..plan.repetitions)
        .into_par_iter()
        .map(|rep| repetition_errors(plan, &resolved, setup, rep))
        .collect();
    let mut sums = vec![0.0; resolved.screen_distances.len()];
    for rep in per_rep {
        for (s, e) in sums.iter_mut().zip(rep?) {
            *s += e;
        }
    }
    let n = plan.repetitions as f64;
    let points = resolved
        .screen_distances
        .iter()
        .zip(sums)
        .map(|(&t, s)| CurvePoint { t, e_db: s / n })
        .collect();
    let metadata = CurveMetadata {
        setup_digest: digest(setup.config())?,
        plan_digest: digest(&(setup.config(), plan))?,
        n_big: resolved.n_big,
        n_rows: resolved.n_rows,
        n_det: resolved.n_det,
        pitch: resolved.pitch,
        seed: plan.seed,
        ensemble_size: plan.ensemble_size,
        repetitions: plan.repetitions,
        version: crate::VERSION.to_string(),
    };
    Ok(ErrorCurve { points, bound_marks: resolved.bound_marks, metadata })
}

/// Desk geometry: 530 nm, 250 µm, 512-sample detector at the default pitch.
pub fn desk_setup(theta1: f64) -> SetupConfig {
    SetupConfig::new(530e-9, 1.0, 250e-6, [512.0 * DEFAULT_PITCH, 512.0 * DEFAULT_PITCH]).with_incidence(theta1, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_plan() -> ExperimentPlan {
        ExperimentPlan {
            n_big: Some(1024),
            n_rows: 8,
            screen_distances: vec![0.0, 5e-6, 10e-6, 60e-6],
            repetitions: 2,
            ensemble_size: 4,
            seed: 3,
            ..Default::default()
        }
    }

    fn small_setup() -> Setup {
        SetupConfig::new(530e-9, 1.0, 60e-6, [128.0 * DEFAULT_PITCH; 2]).with_snr_db(20.0).validate().unwrap()
    }

    #[test]
    fn auto_grid_meets_margin() {
        let s = desk_setup(45f64.to_radians()).with_snr_db(20.0).validate().unwrap();
        let p = ExperimentPlan::default().resolve(&s).unwrap();
        let p_noise = p.bound_marks[0].half_width;
        assert!((p_noise - 65.5e-6).abs() < 0.1e-6);
        let t_max = p.screen_distances.last().unwrap();
        assert!((*t_max - 5.0 * p_noise).abs() < 1e-12);
        let need = p.n_det as f64 * p.pitch + 2.0 * t_max + 2.0 * p_noise;
        assert!(p.n_big as f64 * p.pitch >= need);
        assert_eq!(p.n_big, 8192);
        assert_eq!(p.n_det, 512);
    }

    #[test]
    fn rejects_coarse_pitch() {
        let plan = ExperimentPlan { pitch: 200e-9, ..small_plan() };
        assert!(plan.resolve(&small_setup()).is_err());
    }

    #[test]
    fn clean_reference_is_coherent_model() {
        let s = SetupConfig::new(530e-9, 1.0, 60e-6, [128.0 * DEFAULT_PITCH; 2]).validate().unwrap();
        let plan = small_plan();
        let resolved = plan.resolve(&s).unwrap();
        let scene = plan.scene(&resolved, &s, 0);
        let r = reference_intensity(&plan, &resolved, &s, &scene, 0).unwrap();
        assert_eq!(r, coherent(&scene, &s, &resolved).unwrap());
        assert!(matches!(error_curve(&plan, &s), Err(Error::UndefinedErrorCurve(_))));
    }

    #[test]
    fn noise_injection_variance() {
        let s = small_setup();
        let plan = ExperimentPlan { n_rows: 64, ..small_plan() };
        let resolved = plan.resolve(&s).unwrap();
        let scene = plan.scene(&resolved, &s, 1);
        let clean = coherent(&scene, &s, &resolved).unwrap();
        let r = reference_intensity(&plan, &resolved, &s, &scene, 1).unwrap();
        let n = r.len() as f64;
        let diff: Vec<f64> = r.iter().zip(clean.iter()).map(|(a, b)| a - b).collect();
        let mean = diff.iter().sum::<f64>() / n;
        let var = diff.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
        assert!((var / 0.01 - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn small_curve_shape_and_determinism() {
        let s = small_setup();
        let plan = small_plan();
        let a = error_curve(&plan, &s).unwrap();
        assert!(a.points.windows(2).all(|w| w[1].t > w[0].t));
        assert!(a.points.iter().all(|p| p.e_db.is_finite()));
        assert!(a.points[0].e_db > a.points.last().unwrap().e_db);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| error_curve(&plan, &s).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn curve_helpers() {
        let c = ErrorCurve {
            points: vec![
                CurvePoint { t: 0.0, e_db: 9.0 },
                CurvePoint { t: 1.0, e_db: 4.0 },
                CurvePoint { t: 2.0, e_db: 2.0 },
                CurvePoint { t: 3.0, e_db: 0.5 },
            ],
            bound_marks: vec![BoundMark { cause: "noise".into(), half_width: 1.5 }],
            metadata: CurveMetadata {
                setup_digest: String::new(),
                plan_digest: String::new(),
                n_big: 1,
                n_rows: 1,
                n_det: 1,
                pitch: 1.0,
                seed: 0,
                ensemble_size: 1,
                repetitions: 1,
                version: String::new(),
            },
        };
        assert_eq!(c.knee(KNEE_DB), Some(2.0));
        assert_eq!(c.value_at(1.5), 3.0);
        assert_eq!(c.value_at(10.0), 0.5);
        assert!(c.max_smoothed_rise() < 0.0);
        assert_eq!(c.bound("noise"), Some(1.5));
    }
}
