//! Complex log-Gamma on the right half-plane.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `B_{2k} / (2k (2k - 1))` for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Below this modulus the argument is shifted upwards before Stirling's
/// series is applied; at |z| >= 15 ten terms are accurate to ~1e-17.
const SHIFT_MODULUS: f64 = 15.0;

/// Continuous branch of `ln Gamma(z)` for `Re z > 0`.
///
/// The imaginary part is the analytic continuation from the positive real
/// axis (not reduced modulo 2 pi), which is what the theta function needs.
pub(crate) fn ln_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < SHIFT_MODULUS {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut tail = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        tail += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + tail
}

/// `Im ln Gamma(1/4 + i t/2)` for t >= 0, written out in real arithmetic for
/// large t so that the leading `y ln|w|` term is not polluted by complex
/// rounding.
pub(crate) fn im_ln_gamma_quarter(t: f64) -> f64 {
    let z = Complex64::new(0.25, 0.5 * t);
    if z.norm() < SHIFT_MODULUS {
        return ln_gamma(z).im;
    }
    let (x, y) = (z.re, z.im);
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut tail = 0.0;
    let mut p = inv;
    for c in STIRLING {
        tail += (p * c).im;
        p *= inv2;
    }
    let ln_mod = 0.5 * (x * x + y * y).ln();
    (x - 0.5) * y.atan2(x) + y * (ln_mod - 1.0) + tail
}
