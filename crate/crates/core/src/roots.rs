//! Scalar root finding: geometric bracket growth, bisection and
//! bisection-safeguarded Newton iteration.

use crate::error::{Error, Result};

const MAX_GROWTH: usize = 200;

/// Grows a bracket `[lo, hi]` with `f(lo) <= 0 <= f(hi)` for an increasing
/// function, starting at `start` and stepping geometrically by `step`.
pub fn bracket_increasing<F>(mut f: F, start: f64, step: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let f0 = f(start);
    if !f0.is_finite() {
        return Err(Error::NonFinite("bracket start"));
    }
    if f0 == 0.0 {
        return Ok((start, start));
    }
    let dir = if f0 > 0.0 { -1.0 } else { 1.0 };
    let mut inner = start;
    let mut delta = step;
    for _ in 0..MAX_GROWTH {
        let outer = start + dir * delta;
        let fo = f(outer);
        if fo.is_nan() {
            return Err(Error::NonFinite("bracket growth"));
        }
        if (fo > 0.0) != (f0 > 0.0) || fo == 0.0 {
            return Ok(if dir > 0.0 {
                (inner, outer)
            } else {
                (outer, inner)
            });
        }
        inner = outer;
        delta *= 2.0;
    }
    Err(Error::Bracketing("no sign change within growth limit"))
}

/// Plain bisection on a sign-changing bracket.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::Bracketing("bisection endpoints have equal sign"));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton iteration kept inside a shrinking sign-change bracket; falls back to
/// bisection whenever the Newton step leaves the bracket or stalls.
///
/// `f` returns the value and the derivative. `xtol` is relative for
/// `|x| > 1` and absolute below.
pub fn newton_bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) {
        return Err(Error::NonFinite("newton bracket"));
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::Bracketing("newton endpoints have equal sign"));
    }
    // orient so that f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..max_iter {
        if fx == 0.0 {
            return Ok(x);
        }
        let newton_leaves = ((x - pos) * dfx - fx) * ((x - neg) * dfx - fx) > 0.0;
        let too_slow = (2.0 * fx).abs() > (dx_old * dfx).abs();
        dx_old = dx;
        if newton_leaves || too_slow || !dfx.is_finite() || dfx == 0.0 {
            dx = 0.5 * (pos - neg);
            x = neg + dx;
        } else {
            dx = fx / dfx;
            x -= dx;
        }
        // never finer than a few ulps of x
        let scale = (xtol * x.abs().max(1.0)).max(4.0 * f64::EPSILON * x.abs());
        if dx.abs() <= scale {
            return Ok(x);
        }
        let (nf, nd) = f(x);
        if !nf.is_finite() {
            return Err(Error::NonFinite("newton iterate"));
        }
        fx = nf;
        dfx = nd;
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        if (pos - neg).abs() <= scale {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence("safeguarded Newton"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_then_newton_finds_cube_root() {
        let f = |x: f64| x * x * x - 10.0;
        let (lo, hi) = bracket_increasing(f, 0.0, 0.5).unwrap();
        assert!(f(lo) <= 0.0 && f(hi) >= 0.0);
        let root = newton_bisect(|x| (f(x), 3.0 * x * x), lo, hi, 1e-15, 100).unwrap();
        assert!((root - 10f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn bracket_grows_to_the_left() {
        let (lo, hi) = bracket_increasing(|x| x + 100.0, 0.0, 1.0).unwrap();
        assert!(lo <= -100.0 && hi >= -100.0);
    }

    #[test]
    fn newton_survives_flat_derivative() {
        // derivative vanishes at the midpoint of the bracket
        let root =
            newton_bisect(|x| (x * x * x - 1.0, 3.0 * x * x), -2.0, 2.0, 1e-14, 200).unwrap();
        assert!((root - 1.0).abs() < 1e-13);
    }

    #[test]
    fn bisection_rejects_unbracketed() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_err());
    }
}
