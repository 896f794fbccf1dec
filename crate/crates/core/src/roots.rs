//! Bracketing root finding.

/// A sign-change bracket `[lo, hi]` of a continuous function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Bisects `f` on a bracket until its width is at most `tol` and returns the
/// midpoint together with the final bracket.
///
/// If `f` evaluates to exactly zero at a midpoint that point is returned with
/// a degenerate bracket.
pub fn bisect<F>(f: F, bracket: Bracket, tol: f64) -> (f64, Bracket)
where
    F: Fn(f64) -> f64,
{
    let Bracket {
        mut lo,
        mut hi,
        mut f_lo,
        mut f_hi,
    } = bracket;
    debug_assert!(f_lo.signum() != f_hi.signum() || f_lo == 0.0 || f_hi == 0.0);
    if f_lo == 0.0 {
        return (
            lo,
            Bracket {
                lo,
                hi: lo,
                f_lo,
                f_hi: f_lo,
            },
        );
    }
    if f_hi == 0.0 {
        return (
            hi,
            Bracket {
                lo: hi,
                hi,
                f_lo: f_hi,
                f_hi,
            },
        );
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return (
                mid,
                Bracket {
                    lo: mid,
                    hi: mid,
                    f_lo: fm,
                    f_hi: fm,
                },
            );
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    (0.5 * (lo + hi), Bracket { lo, hi, f_lo, f_hi })
}

/// Returns the brackets where consecutive samples change sign. A sample that
/// is exactly zero is bracketed together with its right neighbour.
pub fn sign_changes(ts: &[f64], values: &[f64]) -> Vec<Bracket> {
    debug_assert_eq!(ts.len(), values.len());
    ts.windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| (v[0] < 0.0) != (v[1] < 0.0) && v[1] != 0.0 || v[0] == 0.0)
        .map(|(t, v)| Bracket {
            lo: t[0],
            hi: t[1],
            f_lo: v[0],
            f_hi: v[1],
        })
        .collect()
}

/// Uniformly spaced grid from `lo` to `hi` inclusive with spacing at most `h`.
pub fn uniform_grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).ceil().max(1.0) as usize;
    let step = (hi - lo) / n as f64;
    (0..=n)
        .map(|i| if i == n { hi } else { lo + step * i as f64 })
        .collect()
}
