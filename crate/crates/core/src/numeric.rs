//! Scalar numerical helpers: adaptive Simpson quadrature, bracketed root
//! finding and golden-section minimisation.

use crate::error::{Error, Result};

/// Maximum recursion depth of [`adaptive_simpson`].
pub const SIMPSON_MAX_DEPTH: u32 = 40;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// The endpoint values are supplied by the caller so that one-sided limits
/// can be used at the ends of the interval (the integrand may jump there).
/// Interior evaluations call `f`.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, fa: f64, fb: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || m <= a || m >= b {
        return Err(Error::QuadratureFailure { a, b });
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Ok(l + r)
}

/// Bisection on a monotone predicate: `pred(lo)` holds, `pred(hi)` does not.
/// Returns the final `(lo, hi)` bracket after at most `max_iter` halvings or
/// once the bracket can no longer shrink in floating point.
pub fn bisect_predicate<P>(mut lo: f64, mut hi: f64, max_iter: usize, pred: P) -> (f64, f64)
where
    P: Fn(f64) -> bool,
{
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Root of `g` in `[lo, hi]` where `g(lo)` and `g(hi)` have opposite signs.
/// Bisection until the bracket width is below `xtol` or stops shrinking.
pub fn bisect_root<G>(g: G, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> f64
where
    G: Fn(f64) -> f64,
{
    let mut glo = g(lo);
    if glo == 0.0 {
        return lo;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Illinois variant of regula falsi on a bracket with `g(lo) <= 0 < g(hi)`.
/// Stops when the bracket is below `xtol` or `g` vanishes.
pub fn illinois<G>(g: G, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> f64
where
    G: Fn(f64) -> f64,
{
    let (mut glo, mut ghi) = (g(lo), g(hi));
    // -1: last update moved `lo`; 1: moved `hi`.
    let mut side = 0;
    for _ in 0..max_iter {
        if hi - lo <= xtol {
            break;
        }
        let mut x = (lo * ghi - hi * glo) / (ghi - glo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx < 0.0 {
            lo = x;
            glo = gx;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            ghi = gx;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
        if glo.abs() <= f64::EPSILON * 1e-2 {
            return lo;
        }
    }
    if glo.abs() <= ghi.abs() {
        lo
    } else {
        hi
    }
}

/// Safeguarded Newton iteration for an increasing function on `[lo, hi]`
/// with `g(lo) <= 0 <= g(hi)`. `g` returns the value and the derivative.
/// Starts at `x0` and falls back to bisection whenever a Newton step leaves
/// the bracket.
pub fn newton_bracketed<G>(g: G, mut lo: f64, mut hi: f64, x0: f64, ftol: f64, max_iter: usize) -> f64
where
    G: Fn(f64) -> (f64, f64),
{
    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    for _ in 0..max_iter {
        let (v, d) = g(x);
        if v.abs() <= ftol {
            return x;
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = if d > 0.0 { x - v / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == x || lo == hi || 0.5 * (lo + hi) == lo || 0.5 * (lo + hi) == hi {
            return next;
        }
        x = next;
    }
    x
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_min<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Order-one Richardson extrapolation from estimates at steps `h` and `h/2`
/// whose error is linear in the step.
#[inline]
pub fn richardson_halving(at_h: f64, at_half_h: f64) -> f64 {
    2.0 * at_half_h - at_h
}
