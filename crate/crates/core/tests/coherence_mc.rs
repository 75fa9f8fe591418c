use holobound::coherence::{
    empirical_gamma_spatial, empirical_gamma_temporal, ensemble_members, gamma_spatial, gamma_temporal,
    mc_average_intensity, mc_spatial_ensemble, mc_temporal_ensemble, CoherenceSpec, SimulationWindow,
    SPEED_OF_LIGHT,
};
use holobound::{ComplexField, Complex64, Grid, SetupConfig, TransferOptions};

fn spec(coherence_length: f64, alpha: f64, m: usize) -> CoherenceSpec {
    CoherenceSpec {
        wavelength: 530e-9,
        refractive_index: 1.0,
        coherence_length,
        source_angular_radius: alpha,
        incidence: [0.0, 0.0],
        ensemble_size: m,
        seed: 17,
    }
}

#[test]
fn temporal_ensemble_follows_gaussian_spectrum() {
    let s = spec(20e-6, 0.0, 4000);
    let lambdas = mc_temporal_ensemble(&s).unwrap();
    let tau_c = s.coherence_length / SPEED_OF_LIGHT;
    for i in 0..=20 {
        let tau = i as f64 * 0.1 * tau_c;
        let diff = (empirical_gamma_temporal(&lambdas, s.wavelength, tau) - gamma_temporal(tau, &s).norm()).abs();
        assert!(diff < 0.04, "τ = {tau:e}: {diff}");
    }
    assert!((gamma_temporal(tau_c, &s).norm() - 0.5).abs() < 1e-12);
}

#[test]
fn spatial_ensemble_follows_airy_coherence() {
    let s = spec(f64::INFINITY, 1e-2, 4000);
    let dirs = mc_spatial_ensemble(&s).unwrap();
    assert!(dirs.iter().all(|d| d[0].hypot(d[1]) <= s.source_angular_radius));
    let first_zero = 3.8317 / (s.wavenumber() * s.source_angular_radius.tan());
    for i in 0..=30 {
        let delta = i as f64 * 0.1 * first_zero;
        let diff = (empirical_gamma_spatial(&dirs, &s, delta) - gamma_spatial(delta, &s).abs()).abs();
        assert!(diff < 0.05, "δ = {delta:e}: {diff}");
    }
}

#[test]
fn ensembles_reproducible_per_seed() {
    let a = ensemble_members(&spec(20e-6, 1e-3, 64)).unwrap();
    let b = ensemble_members(&spec(20e-6, 1e-3, 64)).unwrap();
    assert_eq!(a, b);
    let mut other = spec(20e-6, 1e-3, 64);
    other.seed += 1;
    assert_ne!(a, ensemble_members(&other).unwrap());
}

/// Two narrow slits a distance δ apart: the fringe visibility of the
/// ensemble-averaged hologram falls by |γ_spa(δ)| relative to the coherent one.
#[test]
fn two_slit_visibility_tracks_spatial_coherence() {
    let pitch = 66e-9;
    let n = 4096;
    let delta = 4e-6;
    let z = 60e-6;
    let grid = Grid::centered(n, 1, pitch, [0.0, 0.0]).unwrap();
    let slits = ComplexField::from_fn(grid, 530e-9, 1.0, |x, _| {
        let on = (x - delta / 2.0).abs() < 0.2e-6 || (x + delta / 2.0).abs() < 0.2e-6;
        Complex64::new(if on { 1.0 } else { 0.0 }, 0.0)
    });
    let visibility = |alpha: f64| {
        let setup = SetupConfig::new(530e-9, 1.0, z, [4e-6, pitch])
            .with_source_radius(alpha)
            .validate()
            .unwrap();
        let spec = CoherenceSpec::from_setup(&setup, 600, 5).unwrap();
        let members = ensemble_members(&spec).unwrap();
        let window = SimulationWindow { detector: setup.detector_size, options: TransferOptions::band_limited() };
        let img = mc_average_intensity(&slits, &members, &setup, &window).unwrap();
        let max = img.iter().cloned().fold(0.0, f64::max);
        let min = img.iter().cloned().fold(f64::INFINITY, f64::min);
        ((max - min) / (max + min), spec)
    };
    let (coherent, _) = visibility(0.0);
    for alpha in [0.02, 0.04] {
        let (v, spec) = visibility(alpha);
        let expect = gamma_spatial(delta, &spec).abs();
        assert!((v / coherent - expect).abs() < 0.06, "α = {alpha}: {} vs {expect}", v / coherent);
    }
}
