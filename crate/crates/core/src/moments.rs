//! Window moments `int_T^{T+H} S1^{2l}` with `H = T^{1/2 + epsilon}`, and the
//! mean square of `|zeta|` on the critical line.

use crate::argmod::s1_unchecked;
use crate::quad::{adaptive_simpson, GaussLegendre};
use crate::rs_core::{z_raw, Correction};
use crate::zeros::ZeroStore;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const MIN_T: f64 = 1e3;
pub const MAX_L: u32 = 4;
pub const MAX_EPSILON: f64 = 0.2;
pub const DEFAULT_EPSILON: f64 = 0.1;
/// Relative accuracy of a window integral.
pub const REL_TOL: f64 = 1e-4;

/// Pieces handed to one parallel task.
const CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    #[serde(rename = "T")]
    pub t: f64,
    pub epsilon: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub l: u32,
    #[serde(rename = "I")]
    pub integral: f64,
    pub c_hat: f64,
}

impl MomentEstimate {
    pub const CSV_HEADER: &'static str = "T,epsilon,H,l,I,c_hat";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            crate::report::fmt_num(self.t),
            crate::report::fmt_num(self.epsilon),
            crate::report::fmt_num(self.h),
            self.l,
            crate::report::fmt_num(self.integral),
            crate::report::fmt_num(self.c_hat)
        )
    }

    /// `c_hat^{1/(2l)}`, the level `|S1|` must reach at `alpha0`.
    pub fn level(&self) -> f64 {
        self.c_hat.powf(0.5 / self.l as f64)
    }
}

pub fn window_width(t: f64, epsilon: f64) -> f64 {
    t.powf(0.5 + epsilon)
}

fn check_moment_args(t: f64, l: u32, epsilon: f64) -> Result<()> {
    if !(t >= MIN_T) {
        return Err(Error::Domain(format!("moment windows need T >= {MIN_T}, got {t}")));
    }
    if !(1..=MAX_L).contains(&l) {
        return Err(Error::Domain(format!("l must be in 1..={MAX_L}, got {l}")));
    }
    if !(epsilon > 0.0 && epsilon <= MAX_EPSILON) {
        return Err(Error::Domain(format!(
            "epsilon must be in (0, {MAX_EPSILON}], got {epsilon}"
        )));
    }
    Ok(())
}

pub fn selberg_moment(t: f64, l: u32, epsilon: f64, store: &ZeroStore) -> Result<MomentEstimate> {
    check_moment_args(t, l, epsilon)?;
    let h = window_width(t, epsilon);
    store.check_watermark(t + h)?;
    let integral = power_integral(t, t + h, l, store);
    Ok(MomentEstimate {
        t,
        epsilon,
        h,
        l,
        integral,
        c_hat: integral / h,
    })
}

/// `int_a^b S1^{2l}`. `S1` is smooth between ordinates, so each gap is one
/// adaptive Simpson problem; gaps are integrated in parallel and summed in
/// order.
pub fn power_integral(a: f64, b: f64, l: u32, store: &ZeroStore) -> f64 {
    let pieces = split_at_ordinates(a, b, store);
    let f = |t: f64| s1_unchecked(t, store).powi(2 * l as i32);
    // S1^2 is of order 1 at desk heights; this per-unit tolerance keeps the
    // total far below REL_TOL of any realistic window integral.
    let tol = 1e-3 * REL_TOL;
    let partial: Vec<f64> = pieces
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&(lo, hi)| adaptive_simpson(f, lo, hi, tol * (hi - lo)).0)
                .sum::<f64>()
        })
        .collect();
    partial.iter().sum()
}

/// `[a, b]` cut at every stored ordinate inside it.
pub(crate) fn split_at_ordinates(a: f64, b: f64, store: &ZeroStore) -> Vec<(f64, f64)> {
    let ords = store.ordinates();
    let first = ords.partition_point(|&g| g <= a);
    let mut out = Vec::new();
    let mut left = a;
    for &g in &ords[first..] {
        if g >= b {
            break;
        }
        out.push((left, g));
        left = g;
    }
    out.push((left, b));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub rows: Vec<MomentEstimate>,
    /// `(max c_hat - min c_hat) / min c_hat`.
    pub spread: f64,
}

impl StabilityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(MomentEstimate::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.csv_row());
        }
        out
    }
}

pub fn moment_stability(ts: &[f64], l: u32, epsilon: f64, store: &ZeroStore) -> Result<StabilityReport> {
    if ts.is_empty() {
        return Err(Error::Domain("empty list of window heights".into()));
    }
    let rows = ts
        .iter()
        .map(|&t| selberg_moment(t, l, epsilon, store))
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport {
        spread: relative_spread(rows.iter().map(|r| r.c_hat)),
        rows,
    })
}

pub fn relative_spread(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi == lo {
        0.0
    } else {
        (hi - lo) / lo
    }
}

/// Shortest admissible `U` for [`hl_second_moment`] at height `t`: about a
/// hundred mean zero gaps.
pub fn hl_min_window(t: f64) -> f64 {
    100.0 * 2.0 * std::f64::consts::PI / t.ln()
}

/// `(1 / (U ln T)) int_T^{T+U} Z(t)^2 dt`.
pub fn hl_second_moment(t: f64, u: f64, store: &ZeroStore) -> Result<f64> {
    if !(t >= MIN_T) {
        return Err(Error::Domain(format!("second moment needs T >= {MIN_T}, got {t}")));
    }
    if !(u >= hl_min_window(t)) {
        return Err(Error::Precondition(format!(
            "window U = {u} too short at T = {t}; need U >= {}",
            hl_min_window(t)
        )));
    }
    store.check_watermark(t + u)?;
    let gl = GaussLegendre::ten();
    let z2 = |x: f64| z_raw(x, Correction::Full).powi(2);
    let pieces = split_at_ordinates(t, t + u, store);
    let partial: Vec<f64> = pieces
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&(lo, hi)| gl.integrate_composite(z2, lo, hi, 0.5))
                .sum::<f64>()
        })
        .collect();
    Ok(partial.iter().sum::<f64>() / (u * t.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn store() -> &'static ZeroStore {
        static S: OnceLock<ZeroStore> = OnceLock::new();
        S.get_or_init(|| ZeroStore::scan(3000.0).unwrap())
    }

    #[test]
    fn argument_checks() {
        let st = store();
        assert!(selberg_moment(500.0, 1, 0.1, st).is_err());
        assert!(selberg_moment(1000.0, 0, 0.1, st).is_err());
        assert!(selberg_moment(1000.0, 5, 0.1, st).is_err());
        assert!(selberg_moment(1000.0, 1, 0.3, st).is_err());
        assert!(matches!(
            selberg_moment(2900.0, 1, 0.1, st),
            Err(Error::BeyondWatermark { .. })
        ));
    }

    #[test]
    fn window_additivity() {
        let st = store();
        let (a, b) = (1000.0, 1000.0 + window_width(1000.0, 0.1));
        let m = 0.5 * (a + b);
        let whole = power_integral(a, b, 1, st);
        let halves = power_integral(a, m, 1, st) + power_integral(m, b, 1, st);
        assert!((whole - halves).abs() <= REL_TOL * whole);
    }

    #[test]
    fn estimate_shape() {
        let st = store();
        let est = selberg_moment(1000.0, 2, 0.1, st).unwrap();
        assert_eq!(est.h, 1000f64.powf(0.6));
        assert!(est.integral > 0.0 && est.c_hat > 0.0);
        assert!((est.c_hat - est.integral / est.h).abs() == 0.0);
        assert!((est.level().powi(4) - est.c_hat).abs() < 1e-12 * est.c_hat);
    }

    #[test]
    fn repeated_heights_have_no_spread() {
        let st = store();
        let rep = moment_stability(&[1000.0, 1000.0], 1, 0.1, st).unwrap();
        assert_eq!(rep.spread, 0.0);
        let csv = rep.to_csv();
        assert!(csv.starts_with("T,epsilon,H,l,I,c_hat\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn hl_window_checks() {
        let st = store();
        assert!(matches!(
            hl_second_moment(1000.0, 10.0, st),
            Err(Error::Precondition(_))
        ));
        let v = hl_second_moment(1000.0, 1000.0, st).unwrap();
        assert!(v > 0.6 && v < 1.4, "{v}");
    }
}
