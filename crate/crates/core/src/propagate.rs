//! Scalar propagation by Fourier-domain kernel multiplication.

use std::f64::consts::PI;

use ndarray::{s, Array2, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::field::{ComplexField, Grid};
use crate::model::{wavenumber, Setup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransferKind {
    /// Exact angular-spectrum kernel applied to the full (tilted) field.
    AngularSpectrum,
    /// Angular-spectrum kernel recentred on the illumination carrier. Takes
    /// the object transmittance and reapplies the carrier at the output.
    ShiftedAngularSpectrum,
    /// Paraxial kernel, unit gain at zero frequency.
    Fresnel,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TransferOptions {
    /// Zero frequencies whose kernel displacement leaves the grid window.
    pub band_limit: bool,
    /// Translation of the output window relative to the input window.
    /// Output sample `m` holds the field at input coordinate `x_m + shift`.
    pub output_shift: [f64; 2],
}

impl TransferOptions {
    pub fn band_limited() -> Self {
        TransferOptions { band_limit: true, ..Default::default() }
    }

    /// Band-limited, with the output window following the carrier.
    pub fn tracking(setup: &Setup) -> Self {
        TransferOptions { band_limit: true, output_shift: setup.carrier_displacement() }
    }
}

/// A kernel sampled on the DFT lattice of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    pub samples: Array2<Complex64>,
    pub kind: TransferKind,
    pub band_limited: bool,
    pub grid: Grid,
    pub wavenumber: f64,
    pub distance: f64,
    pub incidence: [f64; 2],
    pub output_shift: [f64; 2],
}

impl TransferFunction {
    /// Kernel of the adjoint operator.
    pub fn adjoint(&self) -> TransferFunction {
        TransferFunction {
            samples: self.samples.mapv(|v| v.conj()),
            output_shift: self.output_shift.map(|d| -d),
            ..self.clone()
        }
    }

    /// Grid of fields produced from input on `input`.
    pub fn output_grid(&self, input: &Grid) -> Grid {
        input.shifted(self.output_shift)
    }
}

/// Coarsest pitch that keeps the tilted carrier below the Nyquist limit.
pub fn max_illumination_pitch(setup: &Setup) -> f64 {
    let s = setup.incidence.iter().map(|t| t.sin().abs()).fold(0.0, f64::max);
    setup.wavelength / (2.0 * setup.refractive_index * (1.0 + s))
}

/// Multiplies the object by the plane-wave carrier `exp(jk·xᵀsinθ)`.
pub fn apply_illumination(object: &ComplexField, setup: &Setup) -> Result<ComplexField> {
    let limit = max_illumination_pitch(setup);
    if object.grid.pitch > limit {
        return Err(Error::TiltedCarrierAliased { pitch: object.grid.pitch, limit });
    }
    let mut out = object.clone();
    out.wavelength = setup.wavelength;
    out.refractive_index = setup.refractive_index;
    apply_carrier(&mut out, setup.wavenumber(), setup.incidence);
    Ok(out)
}

fn apply_carrier(field: &mut ComplexField, k: f64, incidence: [f64; 2]) {
    if incidence == [0.0, 0.0] {
        return;
    }
    let s = incidence.map(f64::sin);
    let grid = field.grid;
    let ramp1: Vec<Complex64> = (0..grid.n1).map(|c| Complex64::from_polar(1.0, k * s[0] * grid.x1(c))).collect();
    let ramp2: Vec<Complex64> = (0..grid.n2).map(|r| Complex64::from_polar(1.0, k * s[1] * grid.x2(r))).collect();
    Zip::indexed(&mut field.samples).par_for_each(|(r, c), v| *v *= ramp1[c] * ramp2[r]);
}

/// Samples the selected kernel on the DFT lattice of `grid`.
pub fn make_transfer(kind: TransferKind, grid: &Grid, setup: &Setup, options: TransferOptions) -> TransferFunction {
    let k = setup.wavenumber();
    let z = setup.distance;
    let shift = match kind {
        TransferKind::ShiftedAngularSpectrum => setup.incidence.map(|t| k * t.sin()),
        _ => [0.0, 0.0],
    };
    let om1 = grid.omega1();
    let om2 = grid.omega2();
    let half = [grid.extent()[0] / 2.0, grid.extent()[1] / 2.0];
    let d = options.output_shift;
    let mut samples = Array2::zeros(grid.shape());
    Zip::indexed(&mut samples).par_for_each(|(r, c), v| {
        let w = [om1[c] + shift[0], om2[r] + shift[1]];
        let (phase, slope_den) = match kind {
            TransferKind::Fresnel => (-z * (w[0] * w[0] + w[1] * w[1]) / (2.0 * k), k),
            _ => {
                let kz2 = k * k - w[0] * w[0] - w[1] * w[1];
                if kz2 <= 0.0 {
                    return;
                }
                let kz = kz2.sqrt();
                (z * kz, kz)
            }
        };
        if options.band_limit {
            for i in 0..2 {
                let displacement = z * w[i] / slope_den - d[i];
                if displacement.abs() > half[i] {
                    return;
                }
            }
        }
        *v = Complex64::from_polar(1.0, phase + om1[c] * d[0] + om2[r] * d[1]);
    });
    TransferFunction {
        samples,
        kind,
        band_limited: options.band_limit,
        grid: *grid,
        wavenumber: k,
        distance: z,
        incidence: setup.incidence,
        output_shift: d,
    }
}

/// A transfer function bundled with an FFT plan for repeated use.
pub struct Propagator {
    tf: TransferFunction,
    fft: Fft2,
}

impl Propagator {
    pub fn new(tf: TransferFunction) -> Self {
        let (rows, cols) = tf.grid.shape();
        Propagator { fft: Fft2::new(rows, cols), tf }
    }

    pub fn transfer(&self) -> &TransferFunction {
        &self.tf
    }

    pub fn apply(&self, input: &ComplexField) -> Result<ComplexField> {
        let tf = &self.tf;
        if !input.grid.same_lattice(&tf.grid) {
            return Err(Error::GridMismatch(format!(
                "field grid {}x{} @ {:e} m vs transfer grid {}x{} @ {:e} m",
                input.grid.n1, input.grid.n2, input.grid.pitch, tf.grid.n1, tf.grid.n2, tf.grid.pitch
            )));
        }
        let k = wavenumber(input.wavelength, input.refractive_index);
        if (k - tf.wavenumber).abs() > 1e-12 * tf.wavenumber {
            return Err(Error::GridMismatch(format!(
                "field wavenumber {k:e} differs from transfer wavenumber {:e}",
                tf.wavenumber
            )));
        }
        let mut data = input.samples.as_standard_layout().into_owned();
        self.fft.forward(&mut data);
        Zip::from(&mut data).and(&tf.samples).par_for_each(|a, h| *a *= h);
        self.fft.inverse(&mut data);
        let mut out = ComplexField {
            samples: data,
            grid: tf.output_grid(&input.grid),
            wavelength: input.wavelength,
            refractive_index: input.refractive_index,
        };
        if tf.kind == TransferKind::ShiftedAngularSpectrum {
            apply_carrier(&mut out, tf.wavenumber, tf.incidence);
        }
        Ok(out)
    }
}

/// `IDFT(H · DFT(g))`, followed by the carrier for the shifted kernel.
pub fn propagate(input: &ComplexField, tf: &TransferFunction) -> Result<ComplexField> {
    Propagator::new(tf.clone()).apply(input)
}

/// Spatial-domain propagation kernel at lateral position `x`.
pub fn huygens_kernel(x: [f64; 2], setup: &Setup) -> Complex64 {
    let k = setup.wavenumber();
    let z = setup.distance;
    let r2 = x[0] * x[0] + x[1] * x[1] + z * z;
    let s = setup.incidence.map(f64::sin);
    let phase = k * (-(x[0] * s[0] + x[1] * s[1]) + r2.sqrt());
    let amp = k * z / (2.0 * PI * r2);
    // 1/j = −j
    Complex64::new(0.0, -amp) * Complex64::from_polar(1.0, phase)
}

/// Samples along one axis covered by a detector of length `size`:
/// `⌊size/pitch⌋` rounded down to even unless it spans the whole grid.
pub fn detector_samples(size: f64, pitch: f64, grid_len: usize) -> Result<usize> {
    let n = (size / pitch * (1.0 + 1e-12)).floor();
    if n > grid_len as f64 {
        return Err(Error::DetectorLargerThanGrid);
    }
    let n = n as usize;
    let n = if n == grid_len { n } else { n & !1 };
    if n == 0 {
        return Err(Error::InvalidArgument(format!("detector {size:e} m spans no sample at pitch {pitch:e} m")));
    }
    Ok(n)
}

/// `[row, col]` start and size of the detector window centred on the
/// physical origin of `grid`.
pub fn detector_window(grid: &Grid, detector: [f64; 2]) -> Result<([usize; 2], [usize; 2])> {
    let n1 = detector_samples(detector[0], grid.pitch, grid.n1)?;
    let n2 = detector_samples(detector[1], grid.pitch, grid.n2)?;
    let start = |origin: f64, n: usize, len: usize| -> Result<usize> {
        let zero = (-origin / grid.pitch).round() as i64;
        let s = zero - (n / 2) as i64;
        if s < 0 || s as usize + n > len {
            return Err(Error::DetectorLargerThanGrid);
        }
        Ok(s as usize)
    };
    let c0 = start(grid.origin[0], n1, grid.n1)?;
    let r0 = start(grid.origin[1], n2, grid.n2)?;
    Ok(([r0, c0], [n2, n1]))
}

/// `|w|²` restricted to the detector window.
pub fn sense_and_crop(field: &ComplexField, detector: [f64; 2]) -> Result<Array2<f64>> {
    let ([r0, c0], [nr, nc]) = detector_window(&field.grid, detector)?;
    Ok(field.samples.slice(s![r0..r0 + nr, c0..c0 + nc]).mapv(|v| v.norm_sqr()))
}
