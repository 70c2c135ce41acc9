//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Stops when the bracket is narrower than `xtol + 4·ε·|x|` or `f(x) == 0`.
pub fn brent<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NotBracketed {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
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
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Ok(b)
}

/// Plain bisection; slower than [`brent`] but shares no code path with it.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NotBracketed { lo, hi, f_lo, f_hi });
    }
    while (hi - lo).abs() > xtol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Expands `[lo, hi]` geometrically (`lo` shrinks, `hi` grows) until `f`
/// changes sign. Both ends must be positive.
pub fn expand_positive_bracket<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, f64)> {
    for _ in 0..200 {
        let (f_lo, f_hi) = (f(lo), f(hi));
        if f_lo.signum() != f_hi.signum() {
            return Ok((lo, hi));
        }
        lo *= 0.5;
        hi *= 2.0;
    }
    Err(Error::NotBracketed {
        lo,
        hi,
        f_lo: f(lo),
        f_hi: f(hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cubic_root() {
        let x = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 100).unwrap();
        assert_relative_eq!(x, 2f64.cbrt(), max_relative = 1e-14);
    }

    #[test]
    fn brent_and_bisection_agree() {
        let f = |x: f64| x.cos() - x;
        let a = brent(f, 0.0, 1.0, 1e-15, 100).unwrap();
        let b = bisect(f, 0.0, 1.0, 1e-15).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn unbracketed_is_error() {
        assert!(matches!(
            brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50),
            Err(Error::NotBracketed { .. })
        ));
    }

    #[test]
    fn bracket_expansion() {
        let f = |x: f64| 1.0 / x - 100.0;
        let (lo, hi) = expand_positive_bracket(&f, 1.0, 2.0).unwrap();
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
    }
}
