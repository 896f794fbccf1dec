//! Quadrature rules: adaptive Simpson and fixed Gauss-Legendre.

use std::sync::OnceLock;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature with Richardson extrapolation.
///
/// Subdivides until the local error estimate on each panel is below its share
/// of `abs_tol`. Returns the integral estimate and the number of integrand
/// evaluations.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, abs_tol: f64) -> (f64, usize)
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return (0.0, 0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut evals = 3;
    let v = simpson_rec(
        &f,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        abs_tol.max(f64::MIN_POSITIVE),
        MAX_DEPTH,
        &mut evals,
    );
    (v, evals)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || (m - a) <= f64::EPSILON * m.abs() {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals)
}

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared 10-point rule.
    pub fn ten() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(10))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum();
        s * half
    }

    /// Composite rule on pieces no longer than `max_piece`.
    pub fn integrate_composite<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, max_piece: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let pieces = ((b - a).abs() / max_piece).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        (0..pieces)
            .map(|i| {
                let lo = a + h * i as f64;
                let hi = if i + 1 == pieces { b } else { lo + h };
                self.integrate(&f, lo, hi)
            })
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite midpoint rule with `n` nodes; a deliberately simple reference
/// quadrature for cross-checks.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + h * (i as f64 + 0.5))).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_weights_and_exactness() {
        let gl = GaussLegendre::new(10);
        let wsum: f64 = gl.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        // Exact for polynomials of degree <= 19.
        let v = gl.integrate(|x| x.powi(18) + x.powi(19), -1.0, 1.0);
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
        let v = gl.integrate(|x| x.exp(), 0.0, 3.0);
        assert!((v - (3f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn simpson_smooth_and_kinked() {
        let (v, _) = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
        let (v, _) = adaptive_simpson(|x: f64| x.abs(), -1.0, 2.0, 1e-12);
        assert!((v - 2.5).abs() < 1e-10);
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-9).0, 0.0);
    }

    #[test]
    fn midpoint_converges() {
        let v = midpoint(|x| x * x, 0.0, 1.0, 1000);
        assert!((v - 1.0 / 3.0).abs() < 1e-6);
    }
}
