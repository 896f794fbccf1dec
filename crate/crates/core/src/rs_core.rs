//! Riemann-Siegel evaluation of theta and the Hardy function `Z(t)`, and the
//! local oscillator form of `Z` around a base point.

use crate::gamma;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Smallest supported critical-line height.
pub const T_MIN: f64 = 10.0;

/// `|Z(t)|` above this certifies that `t` is not a zero ordinate.
pub const Z_FLOOR: f64 = 1e-8;

/// Envelope constant for the bare main sum: `|Z - main_sum| <= K_RS t^{-1/4}`.
///
/// Measured by [`measure_k_rs`] over [10, 1e5] (observed maximum 1.46,
/// essentially `max|Psi| (2 pi)^{1/4}`); rounded up.
pub const K_RS: f64 = 1.6;

/// Envelope constant for the first-correction truncation:
/// `|Z - Z_first| <= K_RS1 t^{-3/4}` for t >= 100. Measured maximum 0.19.
pub const K_RS1: f64 = 0.25;

/// Envelope constant for the spectral form: `|spectral_Z - Z| <= K_SPEC x^{-1/4}`
/// on `[x, x + x^{1/4}]`. Measured by [`measure_k_spec`] on twenty bases in
/// [1e3, 1e5] (observed maximum 1.55); rounded up.
pub const K_SPEC: f64 = 2.0;

/// Height on the critical line, `t >= T_MIN`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CriticalT(f64);

impl CriticalT {
    pub fn new(t: f64) -> Result<Self> {
        if t.is_finite() && t >= T_MIN {
            Ok(CriticalT(t))
        } else {
            Err(Error::BelowMinimum { t, min: T_MIN })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for CriticalT {
    type Error = Error;
    fn try_from(t: f64) -> Result<Self> {
        CriticalT::new(t)
    }
}

/// `sqrt(t / 2 pi)`.
pub fn tau(t: CriticalT) -> f64 {
    tau_raw(t.0)
}

#[inline]
fn tau_raw(t: f64) -> f64 {
    (t / (2.0 * PI)).sqrt()
}

// Coefficients of t^{-1}, t^{-3}, ..., t^{-13} in the asymptotic series of theta.
const THETA_SERIES: [f64; 7] = [
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    511.0 / 1216512.0,
    1414477.0 / 1476034560.0,
    8191.0 / 2555904.0,
];
// Next coefficient (t^{-15}), used only as the tail bound.
const THETA_TAIL: f64 = 118518239.0 / 8021606400.0;
const THETA_FAST_TOL: f64 = 1e-12;

/// Riemann-Siegel theta, `-t/2 ln pi + Im ln Gamma(1/4 + it/2)`.
pub fn theta(t: CriticalT) -> f64 {
    theta_unchecked(t.0)
}

/// Theta from the exact definition (complex log-Gamma), for any `t >= 0`.
pub fn theta_exact(t: f64) -> f64 {
    gamma::im_ln_gamma_quarter(t) - 0.5 * t * PI.ln()
}

/// Asymptotic series for theta, or `None` where the first omitted term does
/// not certify an error below 1e-12.
pub fn theta_asymptotic(t: f64) -> Option<f64> {
    if !(t > 0.0) || THETA_TAIL * t.powi(-15) > THETA_FAST_TOL {
        return None;
    }
    let inv = t.recip();
    let inv2 = inv * inv;
    let mut tail = 0.0;
    let mut p = inv;
    for c in THETA_SERIES {
        tail += c * p;
        p *= inv2;
    }
    Some(0.5 * t * ((t / (2.0 * PI)).ln() - 1.0) - PI / 8.0 + tail)
}

/// Theta for any `t >= 0`, fast path where certified.
#[inline]
pub(crate) fn theta_unchecked(t: f64) -> f64 {
    theta_asymptotic(t).unwrap_or_else(|| theta_exact(t))
}

/// `int_a^b theta(t) dt` for `0 <= a <= b`, composite 10-point Gauss-Legendre
/// on pieces of length <= 2. theta is analytic on the real axis (nearest
/// singularity at distance 1/2 from the origin), so this is accurate to
/// rounding.
pub fn theta_integral(a: f64, b: f64) -> f64 {
    crate::quad::GaussLegendre::ten().integrate_composite(theta_unchecked, a, b, 2.0)
}

/// How many terms of the Riemann-Siegel remainder series are included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Correction {
    /// The bare main sum `2 sum n^{-1/2} cos(theta - t ln n)`.
    None,
    /// Main sum plus the leading remainder term `C0`.
    First,
    /// Main sum plus `C0..C4`; error `O(t^{-11/4})`.
    #[default]
    Full,
}

impl Correction {
    fn terms(self) -> usize {
        match self {
            Correction::None => 0,
            Correction::First => 1,
            Correction::Full => 5,
        }
    }
}

/// `Z(t)` by the Riemann-Siegel formula with the full correction series.
pub fn rs_z(t: CriticalT) -> f64 {
    rs_z_with(t, Correction::Full)
}

pub fn rs_z_with(t: CriticalT, correction: Correction) -> f64 {
    z_raw(t.0, correction)
}

/// `|zeta(1/2 + it)|`.
pub fn zeta_mod(t: CriticalT) -> f64 {
    rs_z(t).abs()
}

/// The bare main sum of the Riemann-Siegel formula.
pub fn main_sum(t: CriticalT) -> f64 {
    z_raw(t.0, Correction::None)
}

pub(crate) fn z_raw(t: f64, correction: Correction) -> f64 {
    let tau = tau_raw(t);
    let n = tau.floor() as usize;
    let th = theta_unchecked(t);
    let mut sum = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        sum += (th - t * kf.ln()).cos() / kf.sqrt();
    }
    sum *= 2.0;
    let terms = correction.terms();
    if terms == 0 {
        return sum;
    }
    let u = tau - n as f64 - 0.5;
    let coeffs = RsCoefficients::get();
    let inv = tau.recip();
    let mut corr = 0.0;
    let mut p = 1.0;
    for poly in coeffs.polys.iter().take(terms) {
        corr += p * horner(poly, u);
        p *= inv;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sum + sign * inv.sqrt() * corr
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Polynomials in `u = p - 1/2` for the Riemann-Siegel coefficient functions
/// `C0..C4`, built from the Taylor series of
/// `Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)`.
struct RsCoefficients {
    polys: [Vec<f64>; 5],
}

const PSI_DEGREE: usize = 72;

impl RsCoefficients {
    fn get() -> &'static RsCoefficients {
        static TABLE: OnceLock<RsCoefficients> = OnceLock::new();
        TABLE.get_or_init(RsCoefficients::build)
    }

    fn build() -> RsCoefficients {
        let a = psi_taylor(PSI_DEGREE);
        // d[m]: coefficients of the m-th derivative of Psi.
        let deriv = |m: usize| -> Vec<f64> {
            (0..a.len().saturating_sub(m))
                .map(|i| {
                    let falling: f64 = ((i + 1)..=(i + m)).map(|j| j as f64).product();
                    a[i + m] * falling
                })
                .collect()
        };
        let pi2 = PI * PI;
        let pi4 = pi2 * pi2;
        let pi6 = pi4 * pi2;
        let pi8 = pi4 * pi4;
        let c0 = deriv(0);
        let c1 = combine(&[(&deriv(3), -1.0 / (96.0 * pi2))]);
        let c2 = combine(&[(&deriv(2), 1.0 / (64.0 * pi2)), (&deriv(6), 1.0 / (18432.0 * pi4))]);
        let c3 = combine(&[
            (&deriv(1), -1.0 / (64.0 * pi2)),
            (&deriv(5), -1.0 / (3840.0 * pi4)),
            (&deriv(9), -1.0 / (5308416.0 * pi6)),
        ]);
        let c4 = combine(&[
            (&deriv(0), 1.0 / (128.0 * pi2)),
            (&deriv(4), 19.0 / (24576.0 * pi4)),
            (&deriv(8), 11.0 / (5898240.0 * pi6)),
            (&deriv(12), 1.0 / (2038431744.0 * pi8)),
        ]);
        RsCoefficients {
            polys: [c0, c1, c2, c3, c4],
        }
    }
}

fn combine(parts: &[(&Vec<f64>, f64)]) -> Vec<f64> {
    let len = parts.iter().map(|(v, _)| v.len()).max().unwrap_or(0);
    let mut out = vec![0.0; len];
    for (v, s) in parts {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += s * x;
        }
    }
    out
}

/// `Psi` as a function of `u = p - 1/2`: `-cos(2 pi u^2 - 5 pi/8) / cos(2 pi u)`.
/// Entire: every zero of the denominator is also a zero of the numerator.
fn psi_u(u: Complex64) -> Complex64 {
    let num = (2.0 * PI * u * u - 5.0 * PI / 8.0).cos();
    let den = (2.0 * PI * u).cos();
    -num / den
}

/// Taylor coefficients of `psi_u` at 0 from the Cauchy integral on |u| = 1,
/// discretised with the trapezoid rule (spectrally accurate for entire
/// functions).
fn psi_taylor(degree: usize) -> Vec<f64> {
    const M: usize = 256;
    let samples: Vec<Complex64> = (0..M)
        .map(|m| psi_u(Complex64::from_polar(1.0, 2.0 * PI * m as f64 / M as f64)))
        .collect();
    (0..=degree)
        .map(|j| {
            let s: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(m, v)| v * Complex64::from_polar(1.0, -2.0 * PI * ((j * m) % M) as f64 / M as f64))
                .sum();
            s.re / M as f64
        })
        .collect()
}

/// Local Riemann oscillators at a base point `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorBank {
    pub base: CriticalT,
    pub term_count: usize,
    /// `omega_n = ln(tau(x) / n)`, n = 1..=term_count.
    pub frequencies: Vec<f64>,
    /// `2 / sqrt(n)`.
    pub amplitudes: Vec<f64>,
    /// `-x/2 - pi/8`.
    pub phase_const: f64,
    /// `K_RS x^{-1/4}`.
    pub remainder_bound: f64,
}

pub fn make_bank(x: CriticalT) -> OscillatorBank {
    let tau = tau(x);
    let term_count = tau.floor() as usize;
    let frequencies = (1..=term_count).map(|n| (tau / n as f64).ln()).collect();
    let amplitudes = (1..=term_count).map(|n| 2.0 / (n as f64).sqrt()).collect();
    OscillatorBank {
        base: x,
        term_count,
        frequencies,
        amplitudes,
        phase_const: -0.5 * x.get() - PI / 8.0,
        remainder_bound: K_RS * x.get().powf(-0.25),
    }
}

impl OscillatorBank {
    /// Maximal window length `V = x^{1/4}`.
    pub fn window(&self) -> f64 {
        self.base.get().powf(0.25)
    }

    /// `K_SPEC x^{-1/4}`.
    pub fn err_spec(&self) -> f64 {
        K_SPEC * self.base.get().powf(-0.25)
    }

    /// `2 sum n^{-1/2} cos(t omega_n - x/2 - pi/8)` for `t` in `[x, x + V]`.
    pub fn spectral_z(&self, t: f64) -> Result<f64> {
        let base = self.base.get();
        let v = self.window();
        if !(t >= base && t <= base + v) {
            return Err(Error::WindowViolation {
                t,
                base,
                end: base + v,
                v_max: v,
            });
        }
        Ok(self.synthesize(t))
    }

    fn synthesize(&self, t: f64) -> f64 {
        self.frequencies
            .iter()
            .zip(&self.amplitudes)
            .map(|(w, a)| a * (t * w + self.phase_const).cos())
            .sum()
    }

    /// Sum of `amplitude * frequency`, a Lipschitz bound for the synthesis.
    pub fn total_weighted_frequency(&self) -> f64 {
        self.frequencies.iter().zip(&self.amplitudes).map(|(w, a)| w * a).sum()
    }
}

/// Largest observed `|Z - main_sum| t^{1/4}` over the given heights.
pub fn measure_k_rs(heights: &[f64]) -> f64 {
    heights
        .iter()
        .filter(|&&t| t >= T_MIN)
        .map(|&t| (z_raw(t, Correction::Full) - z_raw(t, Correction::None)).abs() * t.powf(0.25))
        .fold(0.0, f64::max)
}

/// Largest observed `|spectral_Z - Z| x^{1/4}` over `points` equidistant
/// nodes in each window `[x, x + x^{1/4}]`.
pub fn measure_k_spec(bases: &[f64], points: usize) -> f64 {
    bases
        .iter()
        .filter_map(|&x| CriticalT::new(x).ok())
        .map(|x| {
            let bank = make_bank(x);
            let v = bank.window();
            let worst = (0..points)
                .map(|i| {
                    let t = x.get() + v * i as f64 / (points.max(2) - 1) as f64;
                    (bank.synthesize(t) - z_raw(t, Correction::Full)).abs()
                })
                .fold(0.0, f64::max);
            worst * x.get().powf(0.25)
        })
        .fold(0.0, f64::max)
}
