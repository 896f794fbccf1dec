//! The argument functions `S(t) = N(t) - theta(t)/pi - 1` and
//! `S1(T) = int_0^T S(t) dt`, their mean values, and the odd-order roots of
//! `S1`.
//!
//! `S` is count based: given a verified [`ZeroStore`] it is exact up to the
//! accuracy of theta. With this normalization `S(0+) = -1`; below the first
//! ordinate it differs from a continuous-argument convention that starts at 0.

use crate::quad::adaptive_simpson;
use crate::roots::{bisect, sign_changes, uniform_grid};
use crate::rs_core::{theta_exact, theta_integral, theta_unchecked};
use crate::zeros::{count_n, ZeroStore};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Root brackets of `S1` are bisected to this width.
pub const MU_TOL: f64 = 1e-8;

/// Initial scan spacing for roots of `S1`.
pub const MU_SCAN_STEP: f64 = 1.0;

/// `S(t)`, with the mean of the one-sided limits at an ordinate.
pub fn s(t: f64, store: &ZeroStore) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("S is defined for t >= 0, got {t}")));
    }
    let n = count_n(t, store)?;
    Ok(n - theta_unchecked(t) / PI - 1.0)
}

/// `S1(T)` from the exact structure
/// `sum_{gamma <= T} (T - gamma) - T - (1/pi) int_0^T theta`,
/// accumulated gap by gap so no large terms cancel.
pub fn s1(t: f64, store: &ZeroStore) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("S1 is defined for T >= 0, got {t}")));
    }
    store.check_watermark(t)?;
    Ok(s1_unchecked(t, store))
}

pub(crate) fn s1_unchecked(t: f64, store: &ZeroStore) -> f64 {
    let ords = store.ordinates();
    let k = store.count_le(t);
    if k == 0 {
        return -t - theta_integral(0.0, t) / PI;
    }
    let prefix = s1_prefix(store);
    let g = ords[k - 1];
    prefix[k - 1] + (k as f64 - 1.0) * (t - g) - theta_integral(g, t) / PI
}

/// `S1` at every ordinate.
fn s1_prefix(store: &ZeroStore) -> &[f64] {
    store.s1_prefix.get_or_init(|| {
        let ords = store.ordinates();
        let mut out = Vec::with_capacity(ords.len());
        if let Some(&g1) = ords.first() {
            let mut acc = -g1 - theta_integral(0.0, g1) / PI;
            out.push(acc);
            for i in 1..ords.len() {
                let (a, b) = (ords[i - 1], ords[i]);
                acc += (i as f64 - 1.0) * (b - a) - theta_integral(a, b) / PI;
                out.push(acc);
            }
        }
        out
    })
}

/// `S1(T)` from the literal global formula with the theta integral taken by
/// adaptive Simpson quadrature of the exact theta (tolerance 1e-8). Slower
/// and less accurate at large T than [`s1`]; kept as an independent route.
pub fn s1_direct(t: f64, store: &ZeroStore) -> Result<f64> {
    store.check_watermark(t)?;
    let k = store.count_le(t);
    let gamma_sum: f64 = store.ordinates()[..k].iter().map(|g| t - g).sum();
    let (theta_int, _) = adaptive_simpson(theta_exact, 0.0, t, 1e-8);
    Ok(gamma_sum - t - theta_int / PI)
}

/// `int_a^b S(t) dt` by adaptive Simpson quadrature of `S` on the pieces
/// between consecutive ordinates.
pub fn s_integral(a: f64, b: f64, store: &ZeroStore) -> Result<f64> {
    if !(a >= 0.0 && a <= b) {
        return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
    }
    store.check_watermark(b)?;
    let ords = store.ordinates();
    let first = ords.partition_point(|&g| g <= a);
    let mut left = a;
    let mut count = first;
    let mut total = 0.0;
    let piece = |lo: f64, hi: f64, n: usize| {
        let f = |t: f64| n as f64 - theta_unchecked(t) / PI - 1.0;
        adaptive_simpson(f, lo, hi, 1e-11 * (hi - lo).max(1e-3)).0
    };
    for &g in &ords[first..] {
        if g >= b {
            break;
        }
        total += piece(left, g, count);
        left = g;
        count += 1;
    }
    total += piece(left, b, count);
    Ok(total)
}

/// Odd-order roots of `S1` on a range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootList {
    pub roots: Vec<f64>,
    /// Sign-change bracket of each root.
    pub brackets: Vec<(f64, f64)>,
    pub scanned_from: f64,
    pub scanned_to: f64,
    /// Grid spacing of the final scan.
    pub resolution: f64,
}

/// All sign changes of `S1` on `[lo, hi]`. The scan starts at spacing 1 and
/// is halved until the root count is unchanged by two successive halvings.
pub fn find_mu_roots(lo: f64, hi: f64, store: &ZeroStore) -> Result<RootList> {
    if !(lo >= 0.0 && lo < hi) {
        return Err(Error::Domain(format!("invalid root range [{lo}, {hi}]")));
    }
    store.check_watermark(hi)?;
    let mut h = MU_SCAN_STEP;
    let mut current = mu_scan(lo, hi, h, store);
    let mut stable = 0;
    for _ in 0..10 {
        let finer = mu_scan(lo, hi, 0.5 * h, store);
        h *= 0.5;
        if finer.roots.len() == current.roots.len() {
            stable += 1;
        } else {
            stable = 0;
        }
        current = finer;
        if stable == 2 {
            break;
        }
    }
    Ok(current)
}

/// One scan of `S1` at fixed spacing `h`.
pub fn mu_scan(lo: f64, hi: f64, h: f64, store: &ZeroStore) -> RootList {
    let f = |t: f64| s1_unchecked(t, store);
    let ts = uniform_grid(lo, hi, h);
    let vs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let mut roots = Vec::new();
    let mut brackets = Vec::new();
    for br in sign_changes(&ts, &vs) {
        let (r, fin) = bisect(f, br, MU_TOL);
        // S1(0) = 0 is the base point, not a sign change.
        if r <= MU_TOL || roots.last().is_some_and(|&last: &f64| r <= last) {
            continue;
        }
        roots.push(r);
        brackets.push((fin.lo, fin.hi));
    }
    RootList {
        roots,
        brackets,
        scanned_from: lo,
        scanned_to: hi,
        resolution: h,
    }
}

/// `int_{mu_kbar}^{alpha0} S`, which equals `S1(alpha0)` because
/// `S1(mu_kbar) = 0`.
///
/// The base point `mu_0 = 0`, where `S1` vanishes trivially, is always
/// available when the root scan starts at 0; `roots[i]` is `mu_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedIntegral {
    pub alpha0: f64,
    /// Number of computed roots below `alpha0`; 0 selects the base point.
    pub k_bar: usize,
    pub mu_kbar: f64,
    pub value: f64,
}

pub fn reduce_integral(alpha0: f64, roots: &RootList, store: &ZeroStore) -> Result<ReducedIntegral> {
    if !(alpha0 > roots.scanned_from && alpha0 < roots.scanned_to) {
        return Err(Error::Precondition(format!(
            "alpha0 = {alpha0} is outside the scanned root range [{}, {}]",
            roots.scanned_from, roots.scanned_to
        )));
    }
    let k_bar = roots.roots.partition_point(|&m| m < alpha0);
    let mu = match k_bar {
        0 if roots.scanned_from == 0.0 => 0.0,
        0 => {
            return Err(Error::Precondition(format!(
                "no root of S1 in [{}, {alpha0}); rescan from 0",
                roots.scanned_from
            )))
        }
        k => roots.roots[k - 1],
    };
    let s1_alpha = s1(alpha0, store)?;
    if s1_alpha.abs() <= 1e-6 {
        return Err(Error::Precondition(format!(
            "S1({alpha0}) = {s1_alpha:e} is too close to zero"
        )));
    }
    let value = s_integral(mu, alpha0, store)?;
    Ok(ReducedIntegral {
        alpha0,
        k_bar,
        mu_kbar: mu,
        value,
    })
}

/// Mean of `arg zeta(1/2 + it) = pi S(t)` over `[a, b]`.
pub fn mean_arg(a: f64, b: f64, store: &ZeroStore) -> Result<f64> {
    if !(a >= 0.0 && a < b) {
        return Err(Error::Domain(format!("degenerate interval [{a}, {b}]")));
    }
    store.check_watermark(b)?;
    Ok(PI * (s1_unchecked(b, store) - s1_unchecked(a, store)) / (b - a))
}

/// Default sample density of [`littlewood_profile`].
pub const LITTLEWOOD_PER_DECADE: usize = 2000;

/// `sup |S1(t)| / ln t` over a log-spaced sample of `[100, t_max]`.
pub fn littlewood_profile(t_max: f64, store: &ZeroStore) -> Result<f64> {
    littlewood_profile_with(t_max, store, LITTLEWOOD_PER_DECADE)
}

pub fn littlewood_profile_with(t_max: f64, store: &ZeroStore, per_decade: usize) -> Result<f64> {
    if !(t_max > 100.0) {
        return Err(Error::Domain(format!("profile needs t_max > 100, got {t_max}")));
    }
    store.check_watermark(t_max)?;
    let decades = (t_max / 100.0).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(2);
    Ok((0..=n)
        .map(|i| 100.0 * 10f64.powf(decades * i as f64 / n as f64))
        .map(|t| s1_unchecked(t.min(t_max), store).abs() / t.ln())
        .fold(0.0, f64::max))
}
