//! Bracketed scalar root finding and unimodal maximisation.
//!
//! Sigmoids are nearly flat in both tails, so every root in this crate is
//! located by bisection on a sign-changing bracket. Brackets are discovered by
//! geometric expansion with a hard cap; running out of doublings is an error.

use crate::error::{Error, Result};

/// Absolute tolerance, in seconds, for every time-valued root.
pub const TIME_TOLERANCE: f64 = 1e-9;

/// Upper bound on bisection iterations.
pub const MAX_BISECTION_ITERATIONS: usize = 200;

/// Maximum number of doublings when expanding a bracket.
pub const MAX_DOUBLINGS: usize = 64;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Bisection on `[lo, hi]` for a root of `g`.
///
/// `g` may return `±inf` (used as a sign sentinel); `NaN` is rejected. The
/// endpoints must carry opposite signs or one of them must be an exact zero.
pub fn bisect<G>(mut g: G, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::numeric(format!("bisection bracket [{lo}, {hi}] is inverted")));
    }
    let g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo.is_nan() || g_hi.is_nan() {
        return Err(Error::numeric("bisection objective returned NaN at a bracket end"));
    }
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    let lo_positive = g_lo > 0.0;
    if lo_positive == (g_hi > 0.0) {
        return Err(Error::numeric(format!("bisection bracket [{lo}, {hi}] does not change sign ({g_lo}, {g_hi})")));
    }
    for _ in 0..MAX_BISECTION_ITERATIONS {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid.is_nan() {
            return Err(Error::numeric(format!("bisection objective returned NaN at {mid}")));
        }
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if (g_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Walks `start + width * 2^k` for `k = 0, 1, ...` and returns the first point
/// where `done` holds.
pub fn expand_right<P>(start: f64, width: f64, mut done: P) -> Result<f64>
where
    P: FnMut(f64) -> bool,
{
    let mut step = width;
    for _ in 0..=MAX_DOUBLINGS {
        let t = start + step;
        if done(t) {
            return Ok(t);
        }
        step *= 2.0;
    }
    Err(Error::numeric(format!("bracket expansion from {start} failed after {MAX_DOUBLINGS} doublings")))
}

/// Golden-section search for the maximiser of a unimodal `g` on `[lo, hi]`.
pub fn golden_section_max<G>(mut g: G, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    G: FnMut(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    while hi - lo > tol {
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        }
        if x1 >= x2 {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    // the endpoints can win when the maximum sits on the boundary
    [lo, mid, hi]
        .into_iter()
        .map(|x| (x, g(x)))
        .fold((mid, f64::NEG_INFINITY), |best, (x, v)| if v > best.1 { (x, v) } else { best })
        .0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let root = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((root - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn bisect_accepts_infinite_sentinels() {
        let root = bisect(|x| if x < 1.0 { f64::NEG_INFINITY } else { x - 3.0 }, 0.0, 5.0, 1e-10).unwrap();
        assert!((root - 3.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_rejects_same_sign() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-9), Err(Error::Numeric(_))));
    }

    #[test]
    fn bisect_exact_zero_endpoint() {
        assert_eq!(bisect(|x| x - 1.0, 1.0, 4.0, 1e-9).unwrap(), 1.0);
    }

    #[test]
    fn expansion_cap_is_an_error() {
        assert!(expand_right(0.0, 1.0, |_| false).is_err());
        assert_eq!(expand_right(0.0, 1.0, |t| t >= 8.0).unwrap(), 8.0);
    }

    #[test]
    fn golden_section_interior_and_boundary() {
        let x = golden_section_max(|x| -(x - 1.3).powi(2), 0.0, 4.0, 1e-9);
        assert!((x - 1.3).abs() < 1e-6);
        let x = golden_section_max(|x| -x, 0.0, 4.0, 1e-9);
        assert_eq!(x, 0.0);
    }
}
