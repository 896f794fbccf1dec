//! Segment chains, the oscillatory product system and the search for
//! factorization configurations
//!
//! ```text
//! pi |S1(alpha0)| ~ pi c_l^{1/(2l)} prod_r |Z(alpha_r) / Z(beta_r)|^{-1/l}.
//! ```
//!
//! The iterated segments are approximated by the gap law
//! `g(T) = (1 - c) T / ln T` with width `H = T^{1/2 + epsilon}`; segment `r`
//! is `[T + r g - H/2, T + r g + H/2]`.

use crate::argmod::{mean_arg, reduce_integral, s1, RootList, MU_TOL};
use crate::moments::{window_width, MomentEstimate};
use crate::report::{ConfigReport, K0};
use crate::roots::{bisect, Bracket};
use crate::rs_core::{z_raw, Correction, K_RS, K_RS1, T_MIN, Z_FLOOR};
use crate::zeros::ZeroStore;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.5772156649;
pub const MIN_T: f64 = 1e3;

/// `(1 - c) T / ln T`, the gap law with `pi(T) ~ T / ln T`.
pub fn gap_law(t: f64) -> f64 {
    (1.0 - EULER_GAMMA) * t / t.ln()
}

/// Mean spacing of zero ordinates at height `t`.
pub fn mean_zero_spacing(t: f64) -> f64 {
    2.0 * PI / (t / (2.0 * PI)).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentChain {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub k: usize,
    pub gap: f64,
    /// Segment `r` (1-based) is `segments[r - 1]`.
    pub segments: Vec<(f64, f64)>,
}

impl SegmentChain {
    pub fn center(&self, r: usize) -> f64 {
        self.t + r as f64 * self.gap
    }

    pub fn segment(&self, r: usize) -> (f64, f64) {
        self.segments[r - 1]
    }
}

pub fn build_segments(t: f64, epsilon: f64, k: usize) -> Result<SegmentChain> {
    if !(t >= MIN_T) {
        return Err(Error::Domain(format!("segment chains need T >= {MIN_T}, got {t}")));
    }
    if !(1..=K0).contains(&k) {
        return Err(Error::Domain(format!("k must be in 1..={K0}, got {k}")));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Domain(format!("epsilon must be in (0, 1/2), got {epsilon}")));
    }
    let h = window_width(t, epsilon);
    let gap = gap_law(t);
    if gap <= h {
        return Err(Error::SegmentsOverlap { gap, width: h });
    }
    let segments = (1..=k)
        .map(|r| {
            let c = t + r as f64 * gap;
            (c - 0.5 * h, c + 0.5 * h)
        })
        .collect();
    Ok(SegmentChain { t, h, k, gap, segments })
}

/// Tolerances and limits of the configuration search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderParams {
    pub z_floor: f64,
    /// Relative tolerance of the gap law.
    pub delta_gap: f64,
    pub residual_cap: f64,
    /// Maximum number of `Z` evaluations.
    pub budget: usize,
    pub seed: u64,
    /// Minimum `|alpha_r - beta_r|`; `None` uses the mean zero spacing at `T`.
    pub min_separation: Option<f64>,
    /// Candidate nodes per segment in the greedy pass.
    pub grid: usize,
}

impl Default for LadderParams {
    fn default() -> Self {
        LadderParams {
            z_floor: Z_FLOOR,
            delta_gap: 0.15,
            residual_cap: 1e-3,
            budget: 100_000,
            seed: 0,
            min_separation: None,
            grid: 24,
        }
    }
}

impl LadderParams {
    pub fn separation(&self, t: f64) -> f64 {
        self.min_separation.unwrap_or_else(|| mean_zero_spacing(t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderConfiguration {
    #[serde(rename = "T")]
    pub t: f64,
    pub epsilon: f64,
    pub l: u32,
    pub k: usize,
    pub c_hat: f64,
    pub alpha0: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `Z` evaluations spent by the search.
    pub evaluations: usize,
}

impl LadderConfiguration {
    /// `alpha_{r+1} - alpha_r` for r = 0..k-1.
    pub fn gaps_alpha(&self) -> Vec<f64> {
        std::iter::once(self.alpha0)
            .chain(self.alphas.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect()
    }

    /// `beta_{r+1} - beta_r` for r = 1..k-1.
    pub fn gaps_beta(&self) -> Vec<f64> {
        self.betas.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn level(&self) -> f64 {
        self.c_hat.powf(0.5 / self.l as f64)
    }

    /// The configuration carried by a report; evaluation count is unknown.
    pub fn from_report(r: &ConfigReport) -> Self {
        LadderConfiguration {
            t: r.t,
            epsilon: r.epsilon,
            l: r.l,
            k: r.k,
            c_hat: r.c_hat,
            alpha0: r.alpha0,
            alphas: r.alphas.clone(),
            betas: r.betas.clone(),
            lhs: r.lhs,
            rhs: r.rhs,
            residual: r.residual,
            evaluations: 0,
        }
    }
}

fn abs_z(x: f64) -> f64 {
    z_raw(x, Correction::Full).abs()
}

/// `alpha0` in `(T, T + H)` with `|S1(alpha0)| = c_hat^{1/(2l)}`: the first
/// crossing on a grid of spacing [`ALPHA0_STEP`], refined by bisection.
pub fn choose_alpha0(t: f64, l: u32, est: &MomentEstimate, roots: &RootList, store: &ZeroStore) -> Result<f64> {
    choose_alpha0_with(t, l, est, roots, store, ALPHA0_STEP)
}

pub const ALPHA0_STEP: f64 = 0.25;

pub fn choose_alpha0_with(
    t: f64,
    l: u32,
    est: &MomentEstimate,
    roots: &RootList,
    store: &ZeroStore,
    step: f64,
) -> Result<f64> {
    if est.t != t || est.l != l {
        return Err(Error::Precondition(format!(
            "moment estimate is for T = {}, l = {}, not T = {t}, l = {l}",
            est.t, est.l
        )));
    }
    let (lo, hi) = (t, t + est.h);
    store.check_watermark(hi)?;
    let level = est.level();
    let f = |x: f64| s1(x, store).map(|v| v.abs() - level);
    let n = ((hi - lo) / step).ceil() as usize;
    let mut prev = (lo + step, f(lo + step)?);
    for i in 2..n {
        let x = lo + step * i as f64;
        let v = f(x)?;
        if prev.1 * v < 0.0 {
            let g = |x: f64| s1(x, store).map_or(f64::NAN, |v| v.abs() - level);
            let br = Bracket {
                lo: prev.0,
                hi: x,
                f_lo: prev.1,
                f_hi: v,
            };
            let (a, _) = bisect(g, br, 1e-11);
            let s = s1(a, store)?.abs();
            let near_root = roots.roots.iter().any(|&m| (m - a).abs() <= MU_TOL);
            if s > 1e-6 && !near_root && (s.powi(2 * l as i32) - est.c_hat).abs() <= 1e-6 * est.c_hat {
                return Ok(a);
            }
        }
        prev = (x, v);
    }
    Err(Error::MeanNotAttained { lo, hi })
}

/// `prod |Z(x_r) / Z(y_r)|` with the full Riemann-Siegel evaluation.
pub fn q_product(xs: &[f64], ys: &[f64], z_floor: f64) -> Result<f64> {
    q_product_with(xs, ys, z_floor, Correction::Full)
}

pub fn q_product_with(xs: &[f64], ys: &[f64], z_floor: f64, correction: Correction) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() || xs.len() > K0 {
        return Err(Error::Domain(format!(
            "node lists must have equal length in 1..={K0}, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    for nodes in [xs, ys] {
        if nodes.iter().any(|&x| !(x >= T_MIN)) {
            return Err(Error::Domain(format!("nodes must be >= {T_MIN}")));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("nodes must be strictly increasing".into()));
        }
    }
    let modulus = |x: f64| {
        let m = z_raw(x, Correction::Full).abs();
        if m > z_floor {
            Ok(z_raw(x, correction).abs())
        } else {
            Err(Error::NodeTooClose { node: x, modulus: m })
        }
    };
    let mut p = 1.0;
    for (&x, &y) in xs.iter().zip(ys) {
        p *= modulus(x)? / modulus(y)?;
    }
    Ok(p)
}

/// Open interval `(lo, hi)` shrunk by a relative margin so that derived
/// nodes satisfy strict inequalities.
fn shrink(lo: f64, hi: f64, margin: f64) -> Option<(f64, f64)> {
    let (a, b) = (lo + margin, hi - margin);
    (a < b).then_some((a, b))
}

/// Search state: node positions with their `ln |Z|` values.
struct Search<'a> {
    chain: &'a SegmentChain,
    params: &'a LadderParams,
    alpha0: f64,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    ln_a: Vec<f64>,
    ln_b: Vec<f64>,
    /// Required `sum_r (ln|Z(alpha_r)| - ln|Z(beta_r)|)`.
    target: f64,
    l: f64,
    evals: usize,
    sep: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Node {
    Alpha(usize),
    Beta(usize),
}

impl Search<'_> {
    fn margin(&self) -> f64 {
        1e-9 * self.chain.gap
    }

    fn ln_z(&mut self, x: f64) -> f64 {
        self.evals += 1;
        abs_z(x).ln()
    }

    fn ln_z_many(&mut self, xs: &[f64]) -> Vec<f64> {
        self.evals += xs.len();
        xs.par_iter().map(|&x| abs_z(x).ln()).collect()
    }

    fn residual(&self) -> f64 {
        (self.sum() - self.target).abs() / self.l
    }

    fn sum(&self) -> f64 {
        self.ln_a.iter().sum::<f64>() - self.ln_b.iter().sum::<f64>()
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.params.budget
    }

    /// Admissible positions of one node with the others held fixed, as up
    /// to two disjoint intervals.
    fn feasible(&self, node: Node, upto: usize) -> Vec<(f64, f64)> {
        let g = self.chain.gap;
        let d = self.params.delta_gap;
        let (r, own, other) = match node {
            Node::Alpha(r) => (r, &self.alphas, &self.betas),
            Node::Beta(r) => (r, &self.betas, &self.alphas),
        };
        let (mut lo, mut hi) = self.chain.segment(r + 1);
        let prev = match node {
            Node::Alpha(0) => Some(self.alpha0),
            _ if r > 0 => Some(own[r - 1]),
            _ => None,
        };
        if let Some(p) = prev {
            lo = lo.max(p + (1.0 - d) * g);
            hi = hi.min(p + (1.0 + d) * g);
        }
        if r + 1 < upto {
            let n = own[r + 1];
            lo = lo.max(n - (1.0 + d) * g);
            hi = hi.min(n - (1.0 - d) * g);
        }
        let m = self.margin();
        let Some((lo, hi)) = shrink(lo, hi, m) else {
            return Vec::new();
        };
        if other.len() <= r {
            return vec![(lo, hi)];
        }
        let (xa, xb) = (other[r] - self.sep, other[r] + self.sep);
        [shrink(lo, hi.min(xa), m), shrink(lo.max(xb), hi, m)]
            .into_iter()
            .flatten()
            .collect()
    }

    fn grid(&self, ivs: &[(f64, f64)], n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let total: f64 = ivs.iter().map(|(a, b)| b - a).sum();
        let mut out = Vec::with_capacity(n);
        for &(a, b) in ivs {
            let m = ((n as f64 * (b - a) / total).round() as usize).max(1);
            let h = (b - a) / m as f64;
            for i in 0..m {
                let j: f64 = rng.random_range(-0.4..0.4);
                out.push(a + h * (i as f64 + 0.5 + j));
            }
        }
        out
    }

    /// One greedy pass over the segments.
    fn greedy(&mut self, rng: &mut ChaCha8Rng) -> Result<()> {
        let k = self.chain.k;
        for r in 0..k {
            let a_iv = self.feasible(Node::Alpha(r), r);
            let b_iv = self.feasible(Node::Beta(r), r);
            let xa = self.grid(&a_iv, self.params.grid, rng);
            let xb = self.grid(&b_iv, self.params.grid, rng);
            let la = self.ln_z_many(&xa);
            let lb = self.ln_z_many(&xb);
            let running = self.sum();
            let floor = self.params.z_floor.ln();
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, (&a, &va)) in xa.iter().zip(&la).enumerate() {
                if !(va > floor) {
                    continue;
                }
                for (j, (&b, &vb)) in xb.iter().zip(&lb).enumerate() {
                    if !(vb > floor) || (a - b).abs() < self.sep {
                        continue;
                    }
                    let miss = (running + va - vb - self.target).abs();
                    if best.is_none_or(|(m, _, _)| miss < m) {
                        best = Some((miss, i, j));
                    }
                }
            }
            let Some((_, i, j)) = best else {
                return Err(Error::Precondition(format!(
                    "segment {} has no admissible node pair",
                    r + 1
                )));
            };
            self.alphas.push(xa[i]);
            self.betas.push(xb[j]);
            self.ln_a.push(la[i]);
            self.ln_b.push(lb[j]);
        }
        Ok(())
    }

    /// Coordinate descent: each node in turn is moved to where its `ln |Z|`
    /// makes the residual vanish, if such a point exists nearby.
    fn refine(&mut self, rng: &mut ChaCha8Rng) {
        let k = self.chain.k;
        const SAMPLES: usize = 32;
        for _sweep in 0..16 {
            let start = self.residual();
            for r in 0..k {
                for node in [Node::Alpha(r), Node::Beta(r)] {
                    if self.residual() <= 1e-13 || self.exhausted() {
                        return;
                    }
                    self.move_node(node, SAMPLES, rng);
                }
            }
            if self.residual() >= start {
                break;
            }
        }
    }

    fn move_node(&mut self, node: Node, samples: usize, rng: &mut ChaCha8Rng) {
        let k = self.chain.k;
        let (cur_x, cur_l, sign) = match node {
            Node::Alpha(r) => (self.alphas[r], self.ln_a[r], 1.0),
            Node::Beta(r) => (self.betas[r], self.ln_b[r], -1.0),
        };
        let want = cur_l + sign * (self.target - self.sum());
        let floor = self.params.z_floor.ln();
        let ivs = self.feasible(node, k);
        if ivs.is_empty() {
            return;
        }
        let mut xs = self.grid(&ivs, samples, rng);
        xs.push(cur_x);
        xs.sort_by(f64::total_cmp);
        let ls = self.ln_z_many(&xs);
        // brackets of ln|Z| - want whose endpoints lie in one interval
        let same_iv = |a: f64, b: f64| ivs.iter().any(|&(lo, hi)| a >= lo && b <= hi);
        let mut brackets: Vec<Bracket> = xs
            .windows(2)
            .zip(ls.windows(2))
            .filter(|(x, v)| (v[0] - want) * (v[1] - want) < 0.0 && same_iv(x[0], x[1]))
            .map(|(x, v)| Bracket {
                lo: x[0],
                hi: x[1],
                f_lo: v[0] - want,
                f_hi: v[1] - want,
            })
            .collect();
        brackets.sort_by(|a, b| {
            let da = (0.5 * (a.lo + a.hi) - cur_x).abs();
            let db = (0.5 * (b.lo + b.hi) - cur_x).abs();
            da.total_cmp(&db).then(a.lo.total_cmp(&b.lo))
        });
        let (new_x, new_l) = if let Some(&br) = brackets.first() {
            let count = std::cell::Cell::new(0usize);
            let (x, _) = bisect(
                |x| {
                    count.set(count.get() + 1);
                    abs_z(x).ln() - want
                },
                br,
                1e-13 * cur_x,
            );
            self.evals += count.get();
            (x, self.ln_z(x))
        } else {
            let (i, _) = ls
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > floor)
                .map(|(i, v)| (i, (v - want).abs()))
                .fold((usize::MAX, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
            if i == usize::MAX {
                return;
            }
            (xs[i], ls[i])
        };
        if !(new_l > floor) {
            return;
        }
        let before = self.residual();
        let old = self.set(node, new_x, new_l);
        if self.residual() > before {
            self.set(node, old.0, old.1);
        }
    }

    fn set(&mut self, node: Node, x: f64, l: f64) -> (f64, f64) {
        let (xs, ls, r) = match node {
            Node::Alpha(r) => (&mut self.alphas, &mut self.ln_a, r),
            Node::Beta(r) => (&mut self.betas, &mut self.ln_b, r),
        };
        let old = (xs[r], ls[r]);
        xs[r] = x;
        ls[r] = l;
        old
    }
}

/// Search for a configuration with `alpha0` chosen by [`choose_alpha0`]:
/// greedy pair selection per segment from a seeded jittered grid, then
/// coordinate descent on all `2k` nodes.
#[allow(clippy::too_many_arguments)]
pub fn search_configuration(
    t: f64,
    l: u32,
    epsilon: f64,
    k: usize,
    est: &MomentEstimate,
    roots: &RootList,
    store: &ZeroStore,
    params: &LadderParams,
) -> Result<LadderConfiguration> {
    let chain = build_segments(t, epsilon, k)?;
    store.check_watermark(chain.segment(k).1)?;
    if est.epsilon != epsilon {
        return Err(Error::Precondition(format!(
            "moment estimate has epsilon = {}, not {epsilon}",
            est.epsilon
        )));
    }
    let alpha0 = choose_alpha0(t, l, est, roots, store)?;
    let s1a = s1(alpha0, store)?.abs();
    let mut search = Search {
        chain: &chain,
        params,
        alpha0,
        alphas: Vec::with_capacity(k),
        betas: Vec::with_capacity(k),
        ln_a: Vec::with_capacity(k),
        ln_b: Vec::with_capacity(k),
        target: -(l as f64) * (s1a / est.level()).ln(),
        l: l as f64,
        evals: 0,
        sep: params.separation(t),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    search.greedy(&mut rng)?;
    search.refine(&mut rng);
    finish(search, est, s1a)
}

/// Rerun coordinate descent from the nodes of `start`, projected back into
/// the admissible set where needed.
pub fn refine_configuration(
    start: &LadderConfiguration,
    est: &MomentEstimate,
    store: &ZeroStore,
    params: &LadderParams,
) -> Result<LadderConfiguration> {
    let chain = build_segments(start.t, start.epsilon, start.k)?;
    let s1a = s1(start.alpha0, store)?.abs();
    let mut search = Search {
        chain: &chain,
        params,
        alpha0: start.alpha0,
        alphas: Vec::new(),
        betas: Vec::new(),
        ln_a: Vec::new(),
        ln_b: Vec::new(),
        target: -(start.l as f64) * (s1a / est.level()).ln(),
        l: start.l as f64,
        evals: 0,
        sep: params.separation(start.t),
    };
    for r in 0..start.k {
        let proj = |ivs: Vec<(f64, f64)>, x: f64| {
            ivs.iter()
                .map(|&(a, b)| x.clamp(a, b))
                .min_by(|p, q| (p - x).abs().total_cmp(&(q - x).abs()))
        };
        let a_iv = search.feasible(Node::Alpha(r), r);
        let a = proj(a_iv, start.alphas[r]).ok_or_else(|| infeasible(r))?;
        let la = search.ln_z(a);
        search.alphas.push(a);
        search.ln_a.push(la);
        let b_iv = search.feasible(Node::Beta(r), r);
        let b = proj(b_iv, start.betas[r]).ok_or_else(|| infeasible(r))?;
        let lb = search.ln_z(b);
        search.betas.push(b);
        search.ln_b.push(lb);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    search.refine(&mut rng);
    finish(search, est, s1a)
}

fn infeasible(r: usize) -> Error {
    Error::Precondition(format!("segment {} admits no node", r + 1))
}

fn finish(search: Search<'_>, est: &MomentEstimate, s1a: f64) -> Result<LadderConfiguration> {
    let l = search.l as u32;
    let mut cfg = LadderConfiguration {
        t: search.chain.t,
        epsilon: est.epsilon,
        l,
        k: search.chain.k,
        c_hat: est.c_hat,
        alpha0: search.alpha0,
        alphas: search.alphas,
        betas: search.betas,
        lhs: PI * s1a,
        rhs: f64::NAN,
        residual: f64::NAN,
        evaluations: search.evals,
    };
    let (rhs, residual) = evaluate(&cfg, search.params.z_floor)?;
    cfg.rhs = rhs;
    cfg.residual = residual;
    if !(residual <= search.params.residual_cap) {
        return Err(Error::NoConfiguration { best: Box::new(cfg) });
    }
    Ok(cfg)
}

/// `(rhs, residual)` of a configuration from its nodes and `lhs`.
fn evaluate(cfg: &LadderConfiguration, z_floor: f64) -> Result<(f64, f64)> {
    let p = q_product(&cfg.alphas, &cfg.betas, z_floor)?;
    let rhs = PI * cfg.level() * p.powf(-1.0 / cfg.l as f64);
    Ok((rhs, (cfg.lhs / rhs).ln().abs()))
}

/// Independent re-check of the hard constraints and stored values of a
/// configuration.
pub fn validate_configuration(cfg: &LadderConfiguration, params: &LadderParams, store: &ZeroStore) -> Result<()> {
    let mut problems = Vec::new();
    let t = cfg.t;
    let h = t.powf(0.5 + cfg.epsilon);
    let g = (1.0 - 0.5772156649) * t / t.ln();
    let k = cfg.k;
    if cfg.alphas.len() != k || cfg.betas.len() != k || k == 0 || k > K0 {
        return Err(Error::Verification(format!(
            "configuration has k = {k}, {} alphas, {} betas",
            cfg.alphas.len(),
            cfg.betas.len()
        )));
    }
    if !(t < cfg.alpha0 && cfg.alpha0 < t + h) {
        problems.push(format!("alpha0 = {} not in (T, T+H)", cfg.alpha0));
    }
    let mut prev = cfg.alpha0;
    for (r, &a) in cfg.alphas.iter().enumerate() {
        if !(a > prev) {
            problems.push(format!("alpha_{} not increasing", r + 1));
        }
        prev = a;
    }
    if !(cfg.betas[0] > t) || cfg.betas.windows(2).any(|w| !(w[0] < w[1])) {
        problems.push("betas not increasing above T".into());
    }
    for r in 1..=k {
        let c = t + r as f64 * g;
        let (lo, hi) = (c - h / 2.0, c + h / 2.0);
        for (name, x) in [("alpha", cfg.alphas[r - 1]), ("beta", cfg.betas[r - 1])] {
            if !(lo < x && x < hi) {
                problems.push(format!("{name}_{r} = {x} outside segment ({lo}, {hi})"));
            }
        }
    }
    let tol = params.delta_gap * g;
    for (r, gap) in cfg.gaps_alpha().into_iter().enumerate() {
        if !((gap - g).abs() <= tol) {
            problems.push(format!("alpha gap {r} = {gap} violates |gap - g| <= {tol}"));
        }
    }
    for (r, gap) in cfg.gaps_beta().into_iter().enumerate() {
        if !((gap - g).abs() <= tol) {
            problems.push(format!("beta gap {} = {gap} violates |gap - g| <= {tol}", r + 1));
        }
    }
    for &x in cfg.alphas.iter().chain(&cfg.betas) {
        let m = abs_z(x);
        if !(m > params.z_floor) {
            problems.push(format!("node {x} has |Z| = {m:e} <= z_floor"));
        }
    }
    match s1(cfg.alpha0, store) {
        Ok(v) => {
            let lhs = PI * v.abs();
            if !((lhs - cfg.lhs).abs() <= 1e-9 * lhs) {
                problems.push(format!("stored lhs {} differs from pi |S1(alpha0)| = {lhs}", cfg.lhs));
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    match evaluate(cfg, params.z_floor) {
        Ok((rhs, residual)) => {
            if !((rhs - cfg.rhs).abs() <= 1e-9 * rhs) {
                problems.push(format!("stored rhs {} differs from recomputed {rhs}", cfg.rhs));
            }
            if !(residual <= params.residual_cap) {
                problems.push(format!("residual {residual:e} above cap {:e}", params.residual_cap));
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Verification(problems.join("; ")))
    }
}

/// The four equivalences checked by [`verify_factorization`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    /// (i) `pi |S1(alpha0)|`.
    pub lhs_s1: f64,
    /// (i) `pi |int_{mu_kbar}^{alpha0} S|` by piecewise quadrature.
    pub lhs_reduced: f64,
    pub mu_kbar: f64,
    pub k_bar: usize,
    /// (ii) right side with the full Riemann-Siegel evaluation.
    pub rhs_zeta: f64,
    /// (ii) right side from bare main sums.
    pub rhs_main_sum: f64,
    /// (ii) right side from main sums with the first correction.
    pub rhs_first_correction: f64,
    pub log_gap_main_sum: f64,
    pub envelope_main_sum: f64,
    pub log_gap_first_correction: f64,
    pub envelope_first_correction: f64,
    /// (iii) `prod |Z(alpha_r)/Z(beta_r)|`.
    pub q_value: f64,
    /// (iii) `pi^l sqrt(c_hat) rhs^{-l}`.
    pub q_from_identity: f64,
    pub identity_rel_err: f64,
    /// (iv) mean of `arg zeta` over `[0, alpha0]` and `[mu_kbar, alpha0]`.
    pub mean_0_alpha0: f64,
    pub mean_mukbar_alpha0: f64,
    pub mean_ratio_err: f64,
    pub failures: Vec<String>,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Envelope for `|ln(prod_b) - ln(prod_f)|` when each node value is known
/// to within `env(x)` of the reference `|Z(x)|`.
fn log_envelope(nodes: &[f64], l: f64, env: impl Fn(f64) -> f64) -> f64 {
    nodes
        .iter()
        .map(|&x| {
            let q = env(x) / abs_z(x);
            if q < 1.0 {
                -(1.0 - q).ln()
            } else {
                f64::INFINITY
            }
        })
        .sum::<f64>()
        / l
}

/// Compute all four equivalences; failures are listed, not raised.
pub fn factorization_report(
    cfg: &LadderConfiguration,
    roots: &RootList,
    store: &ZeroStore,
    params: &LadderParams,
) -> Result<FactorizationReport> {
    let l = cfg.l as f64;
    let mut failures = Vec::new();

    let s1a = s1(cfg.alpha0, store)?;
    let red = reduce_integral(cfg.alpha0, roots, store)?;
    let lhs_s1 = PI * s1a.abs();
    let lhs_reduced = PI * red.value.abs();
    if !((s1a - red.value).abs() <= 1e-6) {
        failures.push(format!(
            "(i) lhs routes differ: S1 = {s1a}, reduced integral = {}",
            red.value
        ));
    }

    let rhs_of = |c: Correction| -> Result<f64> {
        let p = q_product_with(&cfg.alphas, &cfg.betas, params.z_floor, c)?;
        Ok(PI * cfg.level() * p.powf(-1.0 / l))
    };
    let rhs_zeta = rhs_of(Correction::Full)?;
    let rhs_main_sum = rhs_of(Correction::None)?;
    let rhs_first_correction = rhs_of(Correction::First)?;
    let nodes: Vec<f64> = cfg.alphas.iter().chain(&cfg.betas).copied().collect();
    let log_gap_main_sum = (rhs_main_sum / rhs_zeta).ln().abs();
    let envelope_main_sum = log_envelope(&nodes, l, |x| K_RS * x.powf(-0.25));
    let log_gap_first_correction = (rhs_first_correction / rhs_zeta).ln().abs();
    let envelope_first_correction = log_envelope(&nodes, l, |x| K_RS1 * x.powf(-0.75));
    if !(log_gap_main_sum <= envelope_main_sum) {
        failures.push(format!(
            "(ii) main-sum route off by {log_gap_main_sum:e} > envelope {envelope_main_sum:e}"
        ));
    }
    if !(log_gap_first_correction <= envelope_first_correction) {
        failures.push(format!(
            "(ii) first-correction route off by {log_gap_first_correction:e} > envelope {envelope_first_correction:e}"
        ));
    }
    if !((rhs_zeta - cfg.rhs).abs() <= 1e-9 * rhs_zeta) {
        failures.push(format!("(ii) stored rhs {} differs from {rhs_zeta}", cfg.rhs));
    }

    let q_value = q_product(&cfg.alphas, &cfg.betas, params.z_floor)?;
    let q_from_identity = PI.powi(cfg.l as i32) * cfg.c_hat.sqrt() * rhs_zeta.powf(-l);
    let identity_rel_err = (q_from_identity - q_value).abs() / q_value;
    if !(identity_rel_err <= 1e-12) {
        failures.push(format!("(iii) product identity relative error {identity_rel_err:e}"));
    }

    let mean_0_alpha0 = mean_arg(0.0, cfg.alpha0, store)?;
    let mean_mukbar_alpha0 = mean_arg(red.mu_kbar, cfg.alpha0, store)?;
    let mean_ratio_err = (mean_mukbar_alpha0 * (cfg.alpha0 - red.mu_kbar) - mean_0_alpha0 * cfg.alpha0).abs();
    if !(mean_ratio_err <= 1e-6 * PI) {
        failures.push(format!("(iv) mean-value ratio identity off by {mean_ratio_err:e}"));
    }
    if let Err(e) = validate_configuration(cfg, params, store) {
        failures.push(format!("constraints: {e}"));
    }

    Ok(FactorizationReport {
        lhs_s1,
        lhs_reduced,
        mu_kbar: red.mu_kbar,
        k_bar: red.k_bar,
        rhs_zeta,
        rhs_main_sum,
        rhs_first_correction,
        log_gap_main_sum,
        envelope_main_sum,
        log_gap_first_correction,
        envelope_first_correction,
        q_value,
        q_from_identity,
        identity_rel_err,
        mean_0_alpha0,
        mean_mukbar_alpha0,
        mean_ratio_err,
        failures,
    })
}

/// [`factorization_report`], failing on the first broken identity.
pub fn verify_factorization(
    cfg: &LadderConfiguration,
    roots: &RootList,
    store: &ZeroStore,
    params: &LadderParams,
) -> Result<FactorizationReport> {
    let rep = factorization_report(cfg, roots, store, params)?;
    match rep.failures.first() {
        None => Ok(rep),
        Some(f) => Err(Error::Verification(f.clone())),
    }
}

/// The configuration report for a verified configuration.
pub fn config_report(cfg: &LadderConfiguration, fac: &FactorizationReport) -> ConfigReport {
    ConfigReport {
        t: cfg.t,
        epsilon: cfg.epsilon,
        l: cfg.l,
        k: cfg.k,
        c_hat: cfg.c_hat,
        alpha0: cfg.alpha0,
        alphas: cfg.alphas.clone(),
        betas: cfg.betas.clone(),
        lhs: cfg.lhs,
        rhs: cfg.rhs,
        residual: cfg.residual,
        mu_kbar: fac.mu_kbar,
        mean_0_alpha0: fac.mean_0_alpha0,
        mean_mukbar_alpha0: fac.mean_mukbar_alpha0,
        gaps_alpha: cfg.gaps_alpha(),
        gaps_beta: cfg.gaps_beta(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inclusions {
    /// Lower bound `T0` of the admissible node sets; here `T`.
    pub t0: f64,
    /// `{alpha_1..alpha_k}` lies in the ordered, non-ordinate set above `T0`.
    pub alphas_in_m1: bool,
    pub betas_in_m2: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub gap: f64,
}

/// The two forms of the product system's value at the control points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QForms {
    /// Product of bare oscillator sums.
    pub oscillator_sums: f64,
    /// Product with the full Riemann-Siegel evaluation.
    pub corrected: f64,
    /// `pi^l sqrt(c_hat) (pi |S1(alpha0)|)^{-l}`.
    pub s1_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetamorphosisReport {
    #[serde(rename = "T")]
    pub t: f64,
    pub epsilon: f64,
    pub l: u32,
    pub k: usize,
    /// The segment width used for every iterated segment.
    pub segment_width: f64,
    pub segment_width_rule: String,
    pub controls_alpha: Vec<f64>,
    pub controls_beta: Vec<f64>,
    pub inclusions: Inclusions,
    pub q_forms: QForms,
    pub gap_table: Vec<GapRow>,
}

pub fn metamorphosis_report(cfg: &LadderConfiguration, params: &LadderParams) -> Result<MetamorphosisReport> {
    let in_set = |xs: &[f64]| {
        xs.first().is_some_and(|&x| x > cfg.t)
            && xs.windows(2).all(|w| w[0] < w[1])
            && xs.iter().all(|&x| abs_z(x) > params.z_floor)
    };
    let q_bare = q_product_with(&cfg.alphas, &cfg.betas, params.z_floor, Correction::None)?;
    let q_full = q_product(&cfg.alphas, &cfg.betas, params.z_floor)?;
    let s1_form = PI.powi(cfg.l as i32) * cfg.c_hat.sqrt() * cfg.lhs.powi(-(cfg.l as i32));
    Ok(MetamorphosisReport {
        t: cfg.t,
        epsilon: cfg.epsilon,
        l: cfg.l,
        k: cfg.k,
        segment_width: window_width(cfg.t, cfg.epsilon),
        segment_width_rule: "H = T^(1/2 + epsilon); the true iterated segment widths are not modelled".into(),
        controls_alpha: std::iter::once(cfg.alpha0).chain(cfg.alphas.iter().copied()).collect(),
        controls_beta: cfg.betas.clone(),
        inclusions: Inclusions {
            t0: cfg.t,
            alphas_in_m1: in_set(&cfg.alphas),
            betas_in_m2: in_set(&cfg.betas),
        },
        q_forms: QForms {
            oscillator_sums: q_bare,
            corrected: q_full,
            s1_form,
        },
        gap_table: [1.0, 2.0, 4.0]
            .iter()
            .map(|m| GapRow {
                t: m * cfg.t,
                gap: gap_law(m * cfg.t),
            })
            .collect(),
    })
}

pub fn parse_metamorphosis_report(text: &str) -> Result<MetamorphosisReport> {
    Ok(serde_json::from_str(text)?)
}
