//! Zero ordinates of `Z(t)`: scanning, verification, persistence and import.
//!
//! A [`ZeroStore`] holds the ordinates of all zeros with `0 < gamma <= T_v`
//! where `T_v` is the verified-up-to watermark. Every count-based function in
//! [`crate::argmod`] reads from a store.

use crate::argmod;
use crate::roots::{bisect, sign_changes, uniform_grid, Bracket};
use crate::rs_core::{theta_integral, theta_unchecked, z_raw, Correction, T_MIN};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

/// Ordinates closer than this to `t` count as "at" `t`.
pub const ORDINATE_TOL: f64 = 1e-9;

/// Pointwise cap on `|S(t)|` used by [`verify_count`], valid for t <= 1e6.
pub const S_CAP: f64 = 3.0;

/// Header prefix of the text store format.
pub const STORE_HEADER: &str = "# zeta-zeros v1";

/// Any ordinate must exceed this; the first zero is at 14.1347...
const FIRST_ORDINATE_FLOOR: f64 = 14.0;

/// Stored ordinates closer than this are treated as the same zero on merge;
/// wide enough to absorb the Riemann-Siegel error near the first zeros.
const MERGE_TOL: f64 = 1e-4;

/// Length of the shards a scan is split into.
const SHARD: f64 = 64.0;

/// Spacing of the windows over which the integral of `S` is checked during a
/// scan.
const WINDOW: f64 = 8.0;

/// Below this `|Z|` the sign of `Z` is not trusted for a parity check.
const PARITY_GUARD: f64 = 1e-4;

/// Where a store's ordinates came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroSource {
    Computed,
    Imported,
    Merged,
}

/// Strictly increasing zero ordinates, complete up to `verified_to`.
#[derive(Debug, Clone)]
pub struct ZeroStore {
    ordinates: Vec<f64>,
    verified_to: f64,
    source: ZeroSource,
    pub(crate) s1_prefix: OnceLock<Vec<f64>>,
}

impl PartialEq for ZeroStore {
    fn eq(&self, other: &Self) -> bool {
        self.ordinates == other.ordinates && self.verified_to == other.verified_to && self.source == other.source
    }
}

impl ZeroStore {
    /// Validates the store invariants.
    pub fn new(ordinates: Vec<f64>, verified_to: f64, source: ZeroSource) -> Result<Self> {
        if !verified_to.is_finite() || verified_to < 0.0 {
            return Err(Error::Domain(format!("invalid watermark {verified_to}")));
        }
        for (i, &g) in ordinates.iter().enumerate() {
            if !g.is_finite() || g <= FIRST_ORDINATE_FLOOR {
                return Err(Error::Domain(format!(
                    "ordinate #{} = {g} is not a valid zero height",
                    i + 1
                )));
            }
            if i > 0 && g <= ordinates[i - 1] {
                return Err(Error::Domain(format!(
                    "ordinates not strictly increasing at #{}",
                    i + 1
                )));
            }
        }
        if let Some(&last) = ordinates.last() {
            if last > verified_to {
                return Err(Error::Domain(format!("ordinate {last} above watermark {verified_to}")));
            }
        }
        Ok(ZeroStore {
            ordinates,
            verified_to,
            source,
            s1_prefix: OnceLock::new(),
        })
    }

    pub fn empty() -> Self {
        ZeroStore {
            ordinates: Vec::new(),
            verified_to: 0.0,
            source: ZeroSource::Imported,
            s1_prefix: OnceLock::new(),
        }
    }

    /// Scans `[T_MIN, t_hi]` and certifies the result with [`verify_count`].
    pub fn scan(t_hi: f64) -> Result<Self> {
        let ordinates = scan_zeros(T_MIN, t_hi)?;
        let store = ZeroStore::new(ordinates, t_hi, ZeroSource::Computed)?;
        let report = verify_count_report(&store, t_hi);
        match report.failure {
            None => Ok(store),
            Some(f) => Err(Error::ScanUnreconciled {
                lo: f.previous,
                hi: f.at,
            }),
        }
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn verified_to(&self) -> f64 {
        self.verified_to
    }

    pub fn source(&self) -> ZeroSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Number of ordinates `<= t`.
    pub(crate) fn count_le(&self, t: f64) -> usize {
        self.ordinates.partition_point(|&g| g <= t)
    }

    pub(crate) fn check_watermark(&self, t: f64) -> Result<()> {
        if t > self.verified_to {
            Err(Error::BeyondWatermark {
                t,
                verified_to: self.verified_to,
            })
        } else {
            Ok(())
        }
    }

    /// Union of two stores; ordinates within 1e-4 of each other are the same
    /// zero (the first store's value is kept). The merged store is re-verified
    /// up to the larger watermark.
    pub fn merge(&self, other: &ZeroStore) -> Result<ZeroStore> {
        let (a, b) = (&self.ordinates, &other.ordinates);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if (x - y).abs() <= MERGE_TOL => {
                    out.push(x);
                    i += 1;
                    j += 1;
                }
                (Some(&x), Some(&y)) if x < y => {
                    out.push(x);
                    i += 1;
                }
                (Some(_), Some(&y)) | (None, Some(&y)) => {
                    out.push(y);
                    j += 1;
                }
                (Some(&x), None) => {
                    out.push(x);
                    i += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        let merged = ZeroStore::new(out, self.verified_to.max(other.verified_to), ZeroSource::Merged)?;
        let report = verify_count_report(&merged, merged.verified_to);
        match report.failure {
            None => Ok(merged),
            Some(f) => Err(Error::Verification(format!(
                "merged store fails the count check at t = {}: {}",
                f.at, f.detail
            ))),
        }
    }

    /// Text form: header line, then one ordinate per line with 9 decimals.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(16 * (self.ordinates.len() + 1));
        let _ = writeln!(s, "{STORE_HEADER} verified_to={:.9}", self.verified_to);
        for g in &self.ordinates {
            let _ = writeln!(s, "{g:.9}");
        }
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Accumulates shards of ordinates in increasing order.
#[derive(Debug, Default)]
pub struct ZeroStoreBuilder {
    ordinates: Vec<f64>,
}

impl ZeroStoreBuilder {
    pub fn push_shard(&mut self, shard: Vec<f64>) -> Result<()> {
        if let (Some(&last), Some(&first)) = (self.ordinates.last(), shard.first()) {
            if first <= last {
                return Err(Error::Domain(format!(
                    "shard starting at {first} overlaps previous shard ending at {last}"
                )));
            }
        }
        self.ordinates.extend(shard);
        Ok(())
    }

    pub fn finish(self, verified_to: f64, source: ZeroSource) -> Result<ZeroStore> {
        ZeroStore::new(self.ordinates, verified_to, source)
    }
}

/// Number of ordinates `<= t`, with the half-limit convention: at an ordinate
/// (within 1e-9) the value is the mean of the one-sided limits.
pub fn count_n(t: f64, store: &ZeroStore) -> Result<f64> {
    store.check_watermark(t)?;
    let below = store.ordinates.partition_point(|&g| g < t - ORDINATE_TOL);
    let upto = store.ordinates.partition_point(|&g| g <= t + ORDINATE_TOL);
    Ok(below as f64 + 0.5 * (upto - below) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckKind {
    /// `sign Z(c) != (-1)^{N(c) - 1}`: an odd number of zeros is missing or
    /// spurious below `c`.
    Parity,
    /// `|S(c)| > S_CAP`.
    SBound,
    /// The integral of `S` between consecutive checkpoints exceeds the
    /// Turing-type bound `2.067 + 0.059 ln t`.
    IntegralDrift,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointFailure {
    pub at: f64,
    /// The preceding checkpoint (or the start of the mesh).
    pub previous: f64,
    pub check: CheckKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checked_to: f64,
    pub checkpoints: usize,
    pub failure: Option<CheckpointFailure>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Bound on `|int_a^b S|` for `a < b`, after Turing's method.
pub fn turing_integral_bound(b: f64) -> f64 {
    2.067 + 0.059 * b.max(1.0).ln()
}

/// True when the store's counts are consistent with `theta(t)/pi + 1` on a
/// mesh of 100 checkpoints up to `t`. See [`verify_count_report`].
pub fn verify_count(store: &ZeroStore, t: f64) -> bool {
    verify_count_report(store, t).ok()
}

/// Completeness check of the store below `t` on a mesh of 100 checkpoints in
/// `(T_MIN, t]`. At each checkpoint `c`:
///
/// * `|N(c) - theta(c)/pi - 1| <= S_CAP`;
/// * `sign Z(c) = (-1)^{N(c) - 1}` (exact; catches any odd count error);
/// * `|S1(c) - S1(c_prev)| <= 2.067 + 0.059 ln c` (catches missing pairs).
///
/// Checkpoints where `|Z|` is too small to trust its sign are nudged down.
pub fn verify_count_report(store: &ZeroStore, t: f64) -> VerifyReport {
    verify_count_mesh(store, t, 100)
}

pub fn verify_count_mesh(store: &ZeroStore, t: f64, checkpoints: usize) -> VerifyReport {
    let t = t.min(store.verified_to);
    let mut mesh: Vec<f64> = if t <= T_MIN {
        vec![t]
    } else {
        (1..=checkpoints.max(1))
            .map(|i| T_MIN + (t - T_MIN) * i as f64 / checkpoints.max(1) as f64)
            .collect()
    };
    if let Some(last) = mesh.last_mut() {
        *last = t;
    }
    let mesh: Vec<f64> = mesh.into_iter().map(nudge_for_parity).collect();
    let fail = |idx: usize, check, detail: String| {
        let previous = if idx == 0 { 0.0_f64.min(t) } else { mesh[idx - 1] };
        VerifyReport {
            checked_to: t,
            checkpoints: idx + 1,
            failure: Some(CheckpointFailure {
                at: mesh[idx],
                previous,
                check,
                detail,
            }),
        }
    };
    // Pointwise checks before the drift checks, which need S1.
    for (idx, &c) in mesh.iter().enumerate() {
        let n = store.count_le(c);
        let s = n as f64 - theta_unchecked(c) / PI - 1.0;
        if s.abs() > S_CAP {
            return fail(idx, CheckKind::SBound, format!("S({c}) = {s:.6} exceeds {S_CAP}"));
        }
        if c >= T_MIN {
            let z = z_raw(c, Correction::Full);
            if z.abs() >= PARITY_GUARD {
                let expect_positive = n % 2 == 1;
                if (z > 0.0) != expect_positive {
                    return fail(
                        idx,
                        CheckKind::Parity,
                        format!("Z({c}) = {z:.6e} has the wrong sign for {n} zeros below"),
                    );
                }
            }
        }
    }
    for (i, w) in mesh.windows(2).enumerate() {
        let (p, c) = (w[0], w[1]);
        let drift = argmod::s1_unchecked(c, store) - argmod::s1_unchecked(p, store);
        let bound = turing_integral_bound(c);
        if drift.abs() > bound {
            return fail(
                i + 1,
                CheckKind::IntegralDrift,
                format!("integral of S over [{p}, {c}] is {drift:.6}, bound {bound:.6}"),
            );
        }
    }
    VerifyReport {
        checked_to: t,
        checkpoints: mesh.len(),
        failure: None,
    }
}

fn nudge_for_parity(c: f64) -> f64 {
    if c < T_MIN {
        return c;
    }
    let mut x = c;
    for _ in 0..64 {
        if x - 1e-3 < T_MIN || z_raw(x, Correction::Full).abs() >= PARITY_GUARD {
            return x;
        }
        x -= 1e-3;
    }
    x
}

/// Scan tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Initial grid spacing is `grid_factor / ln t`.
    pub grid_factor: f64,
    /// Bisection stops when the bracket is this narrow.
    pub tolerance: f64,
    /// How many times a failing window may be rescanned at half spacing.
    pub max_refinements: u32,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            grid_factor: 0.5,
            tolerance: 1e-10,
            max_refinements: 8,
        }
    }
}

/// All zero ordinates of `Z` in `(t_lo, t_hi]`.
pub fn scan_zeros(t_lo: f64, t_hi: f64) -> Result<Vec<f64>> {
    scan_zeros_with(t_lo, t_hi, &ScanOptions::default())
}

pub fn scan_zeros_with(t_lo: f64, t_hi: f64, opts: &ScanOptions) -> Result<Vec<f64>> {
    if !(t_lo >= T_MIN) {
        return Err(Error::BelowMinimum { t: t_lo, min: T_MIN });
    }
    if !(t_hi > t_lo) || !t_hi.is_finite() {
        return Err(Error::Domain(format!("empty scan range ({t_lo}, {t_hi}]")));
    }
    let mut zeros = scan_sharded(t_lo, t_hi, opts.grid_factor, opts.tolerance);
    let mut factor = opts.grid_factor;
    for _ in 0..=opts.max_refinements {
        match reconcile(&zeros, t_lo, t_hi) {
            None => return Ok(zeros),
            Some((a, b)) => {
                factor *= 0.5;
                let a = a.max(t_lo);
                let b = b.min(t_hi);
                let refined = scan_sharded(a, b, factor, opts.tolerance);
                let start = zeros.partition_point(|&g| g <= a);
                let end = zeros.partition_point(|&g| g <= b);
                zeros.splice(start..end, refined);
            }
        }
    }
    let (a, b) = reconcile(&zeros, t_lo, t_hi).unwrap_or((t_lo, t_hi));
    Err(Error::ScanUnreconciled { lo: a, hi: b })
}

fn scan_sharded(lo: f64, hi: f64, factor: f64, tol: f64) -> Vec<f64> {
    let mut edges = vec![lo];
    let mut e = ((lo / SHARD).floor() + 1.0) * SHARD;
    while e < hi {
        edges.push(e);
        e += SHARD;
    }
    edges.push(hi);
    let shards: Vec<Vec<f64>> = edges
        .par_windows(2)
        .map(|w| scan_shard(w[0], w[1], factor, tol))
        .collect();
    let mut builder = ZeroStoreBuilder::default();
    for s in shards {
        // shards are disjoint half-open intervals, so this cannot fail
        builder.push_shard(s).expect("ordered shards");
    }
    builder.ordinates
}

/// Zeros in `(a, b]` from sign changes on a uniform grid, plus pairs hidden
/// inside one sign-preserving dip of `|Z|`.
fn scan_shard(a: f64, b: f64, factor: f64, tol: f64) -> Vec<f64> {
    let z = |t: f64| z_raw(t, Correction::Full);
    let ts = uniform_grid(a, b, factor / b.ln());
    let vs: Vec<f64> = ts.iter().map(|&t| z(t)).collect();
    let mut found: Vec<f64> = sign_changes(&ts, &vs)
        .into_iter()
        .filter(|br| br.f_lo != 0.0 || br.lo > a)
        .map(|br| bisect(z, br, tol).0)
        .filter(|&g| g > a && g <= b)
        .collect();
    for i in 1..vs.len().saturating_sub(1) {
        let (l, m, r) = (vs[i - 1], vs[i], vs[i + 1]);
        let same = (l > 0.0) == (m > 0.0) && (m > 0.0) == (r > 0.0);
        if same && m.abs() < l.abs() && m.abs() < r.abs() {
            if let Some((tmin, zmin)) = dip_minimum(&z, ts[i - 1], ts[i + 1], m.signum()) {
                if zmin.signum() != m.signum() {
                    let left = Bracket {
                        lo: ts[i - 1],
                        hi: tmin,
                        f_lo: l,
                        f_hi: zmin,
                    };
                    let right = Bracket {
                        lo: tmin,
                        hi: ts[i + 1],
                        f_lo: zmin,
                        f_hi: r,
                    };
                    found.push(bisect(z, left, tol).0);
                    found.push(bisect(z, right, tol).0);
                }
            }
        }
    }
    found.retain(|&g| g > a && g <= b);
    found.sort_by(f64::total_cmp);
    found.dedup_by(|x, y| (*x - *y).abs() <= tol);
    found
}

/// Golden-section search for the minimum of `sign * Z` on `[a, b]`.
fn dip_minimum<F: Fn(f64) -> f64>(z: &F, a: f64, b: f64, sign: f64) -> Option<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let g = |t: f64| sign * z(t);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..60 {
        if g1.min(g2) < 0.0 {
            break;
        }
        if g1 < g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let (t, v) = if g1 < g2 { (x1, g1) } else { (x2, g2) };
    Some((t, sign * v))
}

/// First window of the scanned range in which the counts are inconsistent,
/// or `None`. When the range starts above the first zero the number of zeros
/// below `lo` is inferred from the mean of `S` over the whole range.
fn reconcile(zeros: &[f64], lo: f64, hi: f64) -> Option<(f64, f64)> {
    let complete = lo < FIRST_ORDINATE_FLOOR;
    if !complete && hi - lo < 2.0 * WINDOW {
        return None;
    }
    let theta_lo = theta_unchecked(lo);
    // S(t) = base + k(t) - theta(t)/pi with k the zeros found in (lo, t].
    let integral_rel = |a: f64, b: f64| -> f64 {
        // int_a^b (k(t) - (theta(t) - theta_lo)/pi) dt
        let mut acc = 0.0;
        let mut left = a;
        let mut k = zeros.partition_point(|&g| g <= a);
        for &g in &zeros[k..] {
            if g >= b {
                break;
            }
            acc += k as f64 * (g - left);
            left = g;
            k += 1;
        }
        acc += k as f64 * (b - left);
        acc - (theta_integral(a, b) - theta_lo * (b - a)) / PI
    };
    let base = if complete {
        -theta_lo / PI - 1.0
    } else {
        let mean_rel = integral_rel(lo, hi) / (hi - lo);
        let s_lo_estimate = -mean_rel;
        let n0 = (s_lo_estimate + theta_lo / PI + 1.0).round().max(0.0);
        n0 - theta_lo / PI - 1.0
    };
    let mut edges = vec![lo];
    let mut e = lo + WINDOW;
    while e < hi - 0.5 * WINDOW {
        edges.push(e);
        e += WINDOW;
    }
    edges.push(hi);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let drift = base * (b - a) + integral_rel(a, b);
        let k = zeros.partition_point(|&g| g <= b) as f64;
        let s_b = base + k - (theta_unchecked(b) - theta_lo) / PI;
        if drift.abs() > turing_integral_bound(b) || s_b.abs() > S_CAP {
            return Some((a, b));
        }
    }
    None
}

/// Parses the text store format. A first line of the form
/// `# zeta-zeros v1 verified_to=<decimal>` sets the watermark; without it the
/// watermark is the last ordinate. Blank lines and other `#` lines are
/// skipped.
pub fn parse_zero_store(text: &str) -> Result<ZeroStore> {
    let mut verified_to = None;
    let mut ordinates: Vec<f64> = Vec::new();
    let mut seen_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# zeta-zeros") {
            if seen_data || verified_to.is_some() {
                return Err(Error::Ingestion {
                    line: line_no,
                    msg: "header must precede all ordinates".into(),
                });
            }
            verified_to = Some(parse_header(rest.trim()).map_err(|msg| Error::Ingestion { line: line_no, msg })?);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        seen_data = true;
        let g: f64 = line.parse().map_err(|_| Error::Ingestion {
            line: line_no,
            msg: format!("unparsable ordinate {line:?}"),
        })?;
        if !g.is_finite() || g <= FIRST_ORDINATE_FLOOR {
            return Err(Error::Ingestion {
                line: line_no,
                msg: format!("{g} is not a valid zero ordinate"),
            });
        }
        if let Some(&prev) = ordinates.last() {
            if g <= prev {
                return Err(Error::Ingestion {
                    line: line_no,
                    msg: format!("ordinate {g} does not exceed previous {prev}"),
                });
            }
        }
        if let Some(v) = verified_to {
            if g > v {
                return Err(Error::Ingestion {
                    line: line_no,
                    msg: format!("ordinate {g} above verified_to={v}"),
                });
            }
        }
        ordinates.push(g);
    }
    let verified_to = verified_to.unwrap_or_else(|| ordinates.last().copied().unwrap_or(0.0));
    ZeroStore::new(ordinates, verified_to, ZeroSource::Imported).map_err(|e| Error::Ingestion {
        line: 0,
        msg: e.to_string(),
    })
}

fn parse_header(rest: &str) -> std::result::Result<f64, String> {
    let mut parts = rest.split_whitespace();
    match parts.next() {
        Some("v1") => {}
        Some(v) => return Err(format!("unsupported store version {v:?}")),
        None => return Err("missing store version".into()),
    }
    let field = parts.next().ok_or("missing verified_to field")?;
    if parts.next().is_some() {
        return Err("trailing fields in header".into());
    }
    let value = field
        .strip_prefix("verified_to=")
        .ok_or("expected verified_to=<decimal>")?;
    let v: f64 = value.parse().map_err(|_| format!("unparsable watermark {value:?}"))?;
    if !v.is_finite() || v < 0.0 {
        return Err(format!("invalid watermark {v}"));
    }
    Ok(v)
}

/// Reads a store file; see [`parse_zero_store`].
pub fn import_table(path: impl AsRef<Path>) -> Result<ZeroStore> {
    let text = std::fs::read_to_string(path)?;
    parse_zero_store(&text)
}
