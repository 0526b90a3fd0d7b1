//! Bracketing root finders.

use crate::error::{Error, Result};
use crate::real::{c, Real};

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Stops when the bracket is narrower than `xtol` (plus a relative floor) or
/// `f` vanishes exactly.
pub fn brent<T, F>(mut f: F, a: T, b: T, xtol: T, max_iter: usize) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Bracket {
            start: a.to_f64_lossy(),
            lo: a.to_f64_lossy(),
            hi: b.to_f64_lossy(),
        });
    }
    let mut cx = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            cx = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = cx;
            cx = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = c::<T>(2.0) * T::epsilon() * b.abs() + xtol * c(0.5);
        let m = (cx - b) * c(0.5);
        if m.abs() <= tol || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == cx {
                p = c::<T>(2.0) * m * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (c::<T>(2.0) * m * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if c::<T>(2.0) * p < (c::<T>(3.0) * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol { b + d } else { b + tol * m.signum() };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::RootNotConverged { iterations: max_iter });
        }
    }
    Err(Error::RootNotConverged { iterations: max_iter })
}

/// Expands `[start, start + step]` by doubling `step` (in the direction of its
/// sign) until `f` changes sign. Returns the bracket as `(lo, hi)`.
pub fn expand_bracket<T, F>(mut f: F, start: T, step: T, max_doublings: usize) -> Result<(T, T)>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let f0 = f(start);
    if f0 == T::zero() {
        return Ok((start, start));
    }
    let mut prev = start;
    let mut step = step;
    for _ in 0..max_doublings {
        let x = start + step;
        let fx = f(x);
        if !fx.is_finite() {
            break;
        }
        if fx == T::zero() || fx.signum() != f0.signum() {
            return Ok(if x < prev { (x, prev) } else { (prev, x) });
        }
        prev = x;
        step = step * c(2.0);
    }
    Err(Error::Bracket {
        start: start.to_f64_lossy(),
        lo: start.min(prev).to_f64_lossy(),
        hi: start.max(prev).to_f64_lossy(),
    })
}
