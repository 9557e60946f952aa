//! Bracketing root finding (bisection safeguarding secant steps) and a
//! golden-section peak search.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootTolerance {
    /// Stop once `|f(x)| <= f_tol`.
    pub f_tol: f64,
    /// Stop once the bracket is narrower than `x_tol` (absolute).
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for RootTolerance {
    fn default() -> Self {
        RootTolerance { f_tol: 1e-12, x_tol: 0.0, max_iter: 200 }
    }
}

/// Finds a root of `f` in `[a, b]`, where `f(a)` and `f(b)` differ in sign.
///
/// Each iteration tries a secant step from the bracket endpoints and falls
/// back to bisection when the secant point lands outside the bracket or the
/// bracket fails to halve within two iterations. The bracket always shrinks,
/// so termination is guaranteed once it reaches adjacent floats.
pub fn find_root<F>(mut f: F, a: f64, b: f64, tol: RootTolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoSignChange { a: lo, b: hi });
    }
    let mut width_two_ago = f64::INFINITY;
    let mut width_prev = hi - lo;
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    for _ in 0..tol.max_iter {
        let width = hi - lo;
        let mid = lo + 0.5 * width;
        if width <= tol.x_tol || mid <= lo || mid >= hi {
            break;
        }
        let secant = lo - flo * (hi - lo) / (fhi - flo);
        let use_secant = secant.is_finite() && secant > lo && secant < hi && width <= 0.5 * width_two_ago;
        let x = if use_secant { secant } else { mid };
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::NoSignChange { a: lo, b: hi });
        }
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx == 0.0 || fx.abs() <= tol.f_tol {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        width_two_ago = width_prev;
        width_prev = width;
    }
    Ok(best.0)
}

/// Largest value of `g` on `[lo, hi]`, for `g` unimodal near its peak.
///
/// A uniform scan picks the best of `scan` points; golden-section search
/// then refines inside the two neighbouring cells.
pub fn peak<G>(mut g: G, lo: f64, hi: f64, scan: usize) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    let at = |i: usize| lo + (hi - lo) * i as f64 / scan as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..=scan {
        let v = g(at(i))?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let (mut a, mut b) = (at(best.0.saturating_sub(1)), at((best.0 + 1).min(scan)));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = g(x1)?;
    let mut f2 = g(x2)?;
    for _ in 0..100 {
        if b - a <= 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = g(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = g(x1)?;
        }
    }
    Ok(best.1.max(f1).max(f2))
}
