//! Independent reference evaluations used by the integration tests.
//!
//! `hardy_z` evaluates `e^{i theta} zeta(1/2 + it)` in arbitrary precision
//! from the Euler-Maclaurin summation of zeta and the Stirling series of
//! log Gamma. `arg_s` tracks `arg zeta` along the contour 2 -> 2 + iT ->
//! 1/2 + iT in double precision. Neither touches the library.

#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;
use std::path::Path;
use std::sync::OnceLock;
use zeta_ladders::ZeroStore;

const P: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;
/// Euler-Maclaurin correction terms used by both oracles.
const EM_TERMS: usize = 30;

fn bf(x: f64) -> BigFloat {
    BigFloat::from_f64(x, P)
}

fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().expect("decimal rendering parses")
}

#[derive(Clone)]
struct C {
    re: BigFloat,
    im: BigFloat,
}

impl C {
    fn new(re: BigFloat, im: BigFloat) -> Self {
        C { re, im }
    }
    fn real(x: f64) -> Self {
        C::new(bf(x), bf(0.0))
    }
    fn add(&self, o: &C) -> C {
        C::new(self.re.add(&o.re, P, RM), self.im.add(&o.im, P, RM))
    }
    fn mul(&self, o: &C) -> C {
        let re = self.re.mul(&o.re, P, RM).sub(&self.im.mul(&o.im, P, RM), P, RM);
        let im = self.re.mul(&o.im, P, RM).add(&self.im.mul(&o.re, P, RM), P, RM);
        C::new(re, im)
    }
    fn scale(&self, x: &BigFloat) -> C {
        C::new(self.re.mul(x, P, RM), self.im.mul(x, P, RM))
    }
    fn inv(&self) -> C {
        let d = self.re.mul(&self.re, P, RM).add(&self.im.mul(&self.im, P, RM), P, RM);
        C::new(self.re.div(&d, P, RM), self.im.neg().div(&d, P, RM))
    }
}

/// `B_{2k} / (2k)!` for `k = 1..=m`, from `sum_{j<=n} a_j / (n - j + 1)! = 0`.
fn bernoulli_over_factorial(m: usize) -> Vec<BigFloat> {
    let p = 4 * P;
    let n_max = 2 * m;
    let mut inv_fact = vec![BigFloat::from_f64(1.0, p)];
    for i in 1..=n_max + 1 {
        let next = inv_fact[i - 1].div(&BigFloat::from_f64(i as f64, p), p, RM);
        inv_fact.push(next);
    }
    let mut a = vec![BigFloat::from_f64(1.0, p)];
    for n in 1..=n_max {
        let mut acc = BigFloat::from_f64(0.0, p);
        for j in 0..n {
            acc = acc.add(&a[j].mul(&inv_fact[n - j + 1], p, RM), p, RM);
        }
        a.push(acc.neg());
    }
    (1..=m).map(|k| a[2 * k].clone()).collect()
}

fn em_coefficients() -> &'static [BigFloat] {
    static B: OnceLock<Vec<BigFloat>> = OnceLock::new();
    B.get_or_init(|| bernoulli_over_factorial(EM_TERMS))
}

/// Imaginary part of `ln Gamma(1/4 + it/2)` minus `(t/2) ln pi`.
fn theta_hp(t: f64, cc: &mut Consts) -> BigFloat {
    let zr = bf(0.25);
    let zi = bf(t).div(&bf(2.0), P, RM);
    let modsq = zr.mul(&zr, P, RM).add(&zi.mul(&zi, P, RM), P, RM);
    let ln_mod = modsq.ln(P, RM, cc).div(&bf(2.0), P, RM);
    let arg = zi.div(&zr, P, RM).atan(P, RM, cc);
    // Im[(z - 1/2) ln z - z]
    let mut acc = zi
        .mul(&ln_mod, P, RM)
        .sub(&arg.div(&bf(4.0), P, RM), P, RM)
        .sub(&zi, P, RM);
    // Stirling tail sum_k B_{2k} / (2k (2k - 1) z^{2k - 1})
    let b = em_coefficients();
    let z = C::new(zr, zi.clone());
    let w = z.inv();
    let w2 = w.mul(&w);
    let mut pow = w;
    // (n - 2)!
    let mut fact = bf(1.0);
    for k in 1..=12usize {
        let n = 2 * k;
        // B_n / (n (n-1)) = (B_n / n!) (n - 2)!
        let coeff = b[k - 1].mul(&fact, P, RM);
        acc = acc.add(&pow.im.mul(&coeff, P, RM), P, RM);
        pow = pow.mul(&w2);
        fact = fact.mul(&bf((n - 1) as f64 * n as f64), P, RM);
    }
    let half_t_ln_pi = bf(t).mul(&cc.pi(P, RM).ln(P, RM, cc), P, RM).div(&bf(2.0), P, RM);
    acc.sub(&half_t_ln_pi, P, RM)
}

/// `zeta(1/2 + it)` by Euler-Maclaurin with `N ~ t / pi` terms.
fn zeta_half_hp(t: f64, cc: &mut Consts) -> C {
    let n = (t / std::f64::consts::PI).ceil() as usize + 8;
    let mut spf = vec![0usize; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let tb = bf(t);
    let mut v: Vec<C> = Vec::with_capacity(n + 1);
    v.push(C::real(0.0));
    v.push(C::real(1.0));
    for i in 2..=n {
        let p = spf[i];
        let term = if p == i {
            let lp = bf(i as f64).ln(P, RM, cc);
            let amp = bf(i as f64).sqrt(P, RM).reciprocal(P, RM);
            let ang = tb.mul(&lp, P, RM);
            C::new(
                ang.cos(P, RM, cc).mul(&amp, P, RM),
                ang.sin(P, RM, cc).mul(&amp, P, RM).neg(),
            )
        } else {
            v[p].mul(&v[i / p])
        };
        v.push(term);
    }
    let mut sum = C::real(0.0);
    for term in &v[1..n] {
        sum = sum.add(term);
    }
    let nb = bf(n as f64);
    let vn = v[n].clone();
    let s = C::new(bf(0.5), tb.clone());
    let s_minus_1 = C::new(bf(-0.5), tb.clone());
    sum = sum.add(&vn.scale(&nb).mul(&s_minus_1.inv()));
    sum = sum.add(&vn.scale(&bf(0.5)));
    // sum_k B_{2k}/(2k)! s (s+1) ... (s+2k-2) N^{-s-2k+1}
    let inv_n = nb.reciprocal(P, RM);
    let inv_n2 = inv_n.mul(&inv_n, P, RM);
    let mut rising = s.clone();
    let mut npow = vn.scale(&inv_n);
    for (k, b) in em_coefficients().iter().enumerate() {
        let kk = (k + 1) as f64;
        sum = sum.add(&rising.mul(&npow).scale(b));
        let a = C::new(bf(0.5 + 2.0 * kk - 1.0), tb.clone());
        let c = C::new(bf(0.5 + 2.0 * kk), tb.clone());
        rising = rising.mul(&a).mul(&c);
        npow = npow.scale(&inv_n2);
    }
    sum
}

/// Reference `Z(t)` and the imaginary residue of `e^{i theta} zeta`, which
/// should vanish.
pub fn hardy_z(t: f64) -> (f64, f64) {
    let mut cc = Consts::new().expect("constants cache");
    let zeta = zeta_half_hp(t, &mut cc);
    let th = theta_hp(t, &mut cc);
    let (c, s) = (th.cos(P, RM, &mut cc), th.sin(P, RM, &mut cc));
    let re = c.mul(&zeta.re, P, RM).sub(&s.mul(&zeta.im, P, RM), P, RM);
    let im = c.mul(&zeta.im, P, RM).add(&s.mul(&zeta.re, P, RM), P, RM);
    (to_f64(&re), to_f64(&im))
}

/// Reference `theta(t)` for `t >= 100`.
pub fn theta_ref(t: f64) -> f64 {
    let mut cc = Consts::new().expect("constants cache");
    to_f64(&theta_hp(t, &mut cc))
}

fn em_f64() -> &'static [f64] {
    static B: OnceLock<Vec<f64>> = OnceLock::new();
    B.get_or_init(|| em_coefficients().iter().map(to_f64).collect())
}

/// `zeta(s)` in double precision for `1/4 <= Re s <= 3`.
pub fn zeta_f64(s: Complex64) -> Complex64 {
    let n = (s.im.abs() / std::f64::consts::PI).ceil() as usize + 12;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let nf = n as f64;
    let vn = (-s * nf.ln()).exp();
    sum += vn * nf / (s - 1.0) + vn * 0.5;
    let mut rising = s;
    let mut npow = vn / nf;
    for (k, b) in em_f64().iter().enumerate() {
        let kk = (k + 1) as f64;
        sum += rising * npow * *b;
        rising *= (s + (2.0 * kk - 1.0)) * (s + 2.0 * kk);
        npow /= nf * nf;
    }
    sum
}

/// `(1/pi) arg zeta(1/2 + iT)` by continuous variation along
/// 2 -> 2 + iT -> 1/2 + iT.
pub fn arg_s(t: f64) -> f64 {
    // On Re s = 2, |zeta - 1| < 1, so the principal argument is continuous.
    let top = zeta_f64(Complex64::new(2.0, t));
    let mut arg = top.arg();
    let mut prev = top;
    let steps = 3000;
    for i in 1..=steps {
        let sigma = 2.0 - 1.5 * i as f64 / steps as f64;
        let z = zeta_f64(Complex64::new(sigma, t));
        let d = (z / prev).arg();
        assert!(d.abs() < 1.0, "argument step too large at sigma = {sigma}, t = {t}");
        arg += d;
        prev = z;
    }
    arg / std::f64::consts::PI
}

/// A store scanned once per test binary and reused.
pub fn store_to(t: f64) -> ZeroStore {
    ZeroStore::scan(t).expect("scan succeeds")
}

pub fn shared_store(t: f64) -> &'static ZeroStore {
    static S: OnceLock<ZeroStore> = OnceLock::new();
    let st = S.get_or_init(|| store_to(t));
    assert!(
        st.verified_to() >= t,
        "shared store built to {} < {t}",
        st.verified_to()
    );
    st
}

pub fn tmp_path(name: &str) -> std::path::PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}
