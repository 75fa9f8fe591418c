//! Analytic knife-edge diffraction under oblique illumination.
//!
//! The opaque half-plane covers x₁ < 0 of the sample plane and the
//! illumination is tilted by θ₁. Detector positions are expressed as the
//! offset `t` from the geometrical shadow boundary `x_c = z·tanθ₁`, positive
//! toward the lit side. Field amplitudes are normalised so that the lit side
//! tends to unit intensity.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Setup;

/// `(C(u), S(u))`, the normalised Fresnel cosine and sine integrals
/// `∫₀ᵘ cos(πs²/2) ds`, `∫₀ᵘ sin(πs²/2) ds`.
pub fn fresnel_cs(u: f64) -> (f64, f64) {
    let a = u.abs();
    let (c, s) = if a <= 1.5 {
        fresnel_series(a)
    } else {
        let (e, h) = fresnel_tail(a);
        let cs = Complex64::new(0.5, 0.5) * (1.0 - e * h);
        (cs.re, cs.im)
    };
    if u < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

fn fresnel_series(a: f64) -> (f64, f64) {
    if a < 1e-150 {
        return (a, 0.0);
    }
    let fact = FRAC_PI_2 * a * a;
    let mut term = a;
    let mut c = a;
    let mut s = 0.0;
    // alternating terms a·(−1)^m·fact^n/(n!·(2n+1)), even n to C, odd to S
    for n in 1..200 {
        term *= fact / n as f64;
        let signed = if (n / 2) % 2 == 0 { term } else { -term };
        let contrib = signed / (2 * n + 1) as f64;
        if n % 2 == 0 {
            c += contrib;
        } else {
            s += contrib;
        }
        if term / ((2 * n + 1) as f64) < f64::EPSILON * c.abs().max(s.abs()) * 0.1 {
            break;
        }
    }
    (c, s)
}

/// Continued-fraction tail: `(e, h)` with `½(1+j)·e·h = ½(1+j) − (C + jS)`.
fn fresnel_tail(a: f64) -> (Complex64, Complex64) {
    let pix2 = PI * a * a;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1e300, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut n = -1.0;
    for _ in 2..500 {
        n += 2.0;
        let an = -n * (n + 1.0);
        b += 4.0;
        d = 1.0 / (an * d + b);
        cc = b + an / cc;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < f64::EPSILON {
            break;
        }
    }
    h *= Complex64::new(a, -a);
    (Complex64::from_polar(1.0, 0.5 * pix2), h)
}

/// `F(x) = ∫ₓ^∞ exp(jt²) dt`.
pub fn fresnel_integral(x: f64) -> Complex64 {
    if x.is_infinite() {
        return if x > 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(PI.sqrt(), FRAC_PI_4)
        };
    }
    let scale = FRAC_PI_2.sqrt();
    let u = x * (2.0 / PI).sqrt();
    let half = Complex64::new(0.5, 0.5);
    if u.abs() <= 1.5 {
        let (c, s) = fresnel_series(u.abs());
        let cs = if u < 0.0 { Complex64::new(-c, -s) } else { Complex64::new(c, s) };
        return scale * (half - cs);
    }
    // avoid the cancellation ½ − C(u) on the far side
    let (e, h) = fresnel_tail(u.abs());
    let tail = half * e * h;
    if u > 0.0 {
        scale * tail
    } else {
        scale * (Complex64::new(1.0, 1.0) - tail)
    }
}

/// Field at polar position `(r, alpha)` about the edge, `alpha` measured
/// from the shadow boundary and positive toward the lit side.
pub fn half_plane_field(r: f64, alpha: f64, setup: &Setup) -> Result<Complex64> {
    let theta = setup.incidence[0];
    let ct = theta.cos();
    let denom = (theta + alpha).cos() + ct;
    if denom <= 0.0 {
        return Err(Error::OutsideFormulaValidity("cos(θ+α) + cosθ must be positive"));
    }
    let amp = ((1.0 + alpha.cos()) / (PI * ct * denom)).sqrt() * ct;
    Ok(boundary_wave(r, alpha, amp, setup.wavenumber()))
}

fn boundary_wave(r: f64, alpha: f64, amp: f64, k: f64) -> Complex64 {
    Complex64::from_polar(amp, -FRAC_PI_4 + k * r * alpha.cos()) * fresnel_integral(-(2.0 * k * r).sqrt() * (alpha / 2.0).sin())
}

/// Field on the detector at offset `t` from the shadow boundary.
///
/// The obliquity factor is taken at the shadow boundary, where it equals
/// `1/√π`. Away from the boundary the full factor of [`half_plane_field`]
/// drifts off unit lit-side intensity under oblique illumination, while an
/// exact propagation of a tilted plane wave stays at 1.
pub fn edge_field(t: f64, setup: &Setup) -> Result<Complex64> {
    let z = setup.distance;
    let theta = setup.incidence[0];
    let x = z * theta.tan() + t;
    let r = x.hypot(z);
    let alpha = x.atan2(z) - theta;
    Ok(boundary_wave(r, alpha, 1.0 / PI.sqrt(), setup.wavenumber()))
}

/// Upper bound on the lit-side fringe intensity at offset `t > 0`.
pub fn envelope(t: f64, setup: &Setup) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("envelope needs t ≥ 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(f64::INFINITY);
    }
    let theta = setup.incidence[0];
    let rc = setup.distance / theta.cos();
    Ok(1.0 + (2.0 * (rc + t * theta.sin().abs())).sqrt() / ((PI * setup.wavenumber()).sqrt() * t * theta.cos()))
}

/// Offset at which the envelope excess falls to `eta`, by bisection.
pub fn solve_half_width(eta: f64, setup: &Setup) -> Result<f64> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!("threshold η must be positive, got {eta}")));
    }
    let excess = |t: f64| envelope(t, setup).map(|e| e - 1.0 - eta);
    let mut hi = setup.distance;
    while excess(hi)? > 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while excess(lo)? <= 0.0 {
        lo /= 2.0;
    }
    while (hi - lo) > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Intensities and envelope sampled at offsets from the shadow boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeProfile {
    pub offsets: Vec<f64>,
    pub intensities: Vec<f64>,
    /// `+∞` on the shadow side, where no bound is defined.
    pub envelope: Vec<f64>,
}

impl EdgeProfile {
    pub fn compute(offsets: &[f64], setup: &Setup) -> Result<EdgeProfile> {
        let mut intensities = Vec::with_capacity(offsets.len());
        let mut env = Vec::with_capacity(offsets.len());
        for &t in offsets {
            intensities.push(edge_field(t, setup)?.norm_sqr());
            env.push(if t > 0.0 { envelope(t, setup)? } else { f64::INFINITY });
        }
        Ok(EdgeProfile { offsets: offsets.to_vec(), intensities, envelope: env })
    }

    /// `n` evenly spaced offsets over `[start, stop]`.
    pub fn linspace(start: f64, stop: f64, n: usize, setup: &Setup) -> Result<EdgeProfile> {
        if n < 2 || !(stop > start) {
            return Err(Error::InvalidArgument("profile needs n ≥ 2 and stop > start".into()));
        }
        let step = (stop - start) / (n - 1) as f64;
        let offsets: Vec<f64> = (0..n).map(|i| start + i as f64 * step).collect();
        Self::compute(&offsets, setup)
    }

    /// Index of the first local maximum of intensity at `t > 0`.
    pub fn first_fringe_maximum(&self) -> Option<usize> {
        first_local_max(&self.offsets, &self.intensities)
    }
}

/// First interior local maximum of `values` among points with positive offset.
pub fn first_local_max(offsets: &[f64], values: &[f64]) -> Option<usize> {
    (1..values.len().saturating_sub(1))
        .find(|&i| offsets[i] > 0.0 && values[i] >= values[i - 1] && values[i] > values[i + 1])
}
