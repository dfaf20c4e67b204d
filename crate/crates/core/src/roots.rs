//! Bracketing root finder and bracketed minimizer (Brent's methods), over
//! fallible objective functions.

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BracketError<E> {
    #[error("no sign change over [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("iteration limit reached")]
    IterationLimit,
    #[error("objective failed: {0}")]
    Objective(E),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub value: T,
    /// Final enclosing interval.
    pub lo: T,
    pub hi: T,
    pub evaluations: usize,
}

/// Scale-aware tolerance: `tol` absolute below 1 in magnitude, relative above.
#[inline]
pub fn scaled_tolerance<T: Real>(tol: T, x: T) -> T {
    tol * T::one().max(x.abs())
}

/// Root of `f` in `[a, b]` given `f(a)`, `f(b)` of opposite sign.
///
/// Iterates never leave the bracket; the result's enclosing interval is no
/// wider than the absolute tolerance `xtol` up to rounding.
pub fn brent_root<T, E, F>(mut f: F, a: T, b: T, fa: T, fb: T, xtol: T, max_iter: usize) -> Result<Root<T>, BracketError<E>>
where
    T: Real,
    F: FnMut(T) -> Result<T, E>,
{
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa == T::zero() {
        return Ok(Root { x: a, value: fa, lo: a, hi: a, evaluations: 0 });
    }
    if fb == T::zero() {
        return Ok(Root { x: b, value: fb, lo: b, hi: b, evaluations: 0 });
    }
    if (fa > T::zero()) == (fb > T::zero()) || fa.is_nan() || fb.is_nan() {
        return Err(BracketError::NoSignChange {
            lo: a.min(b).to_f64().unwrap_or(f64::NAN),
            hi: a.max(b).to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;
    let mut evaluations = 0;
    for _ in 0..max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
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
        let tol1 = T::two() * T::epsilon() * b.abs() + T::half() * xtol;
        let xm = T::half() * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(Root { x: b, value: fb, lo: b.min(c), hi: b.max(c), evaluations });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = T::two() * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (T::two() * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let limit1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let limit2 = (e * q).abs();
            if T::two() * p < limit1.min(limit2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 { b + d } else { b + tol1.copysign(xm) };
        fb = f(b).map_err(BracketError::Objective)?;
        evaluations += 1;
    }
    Err(BracketError::IterationLimit)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Minimum of `f` on `[a, b]` by golden-section search with parabolic steps,
/// starting from an interior point `x` with known value `fx`.
pub fn brent_minimize<T, E, F>(mut f: F, a: T, b: T, x: T, fx: T, xtol: T, max_iter: usize) -> Result<Minimum<T>, E>
where
    T: Real,
    F: FnMut(T) -> Result<T, E>,
{
    let golden = T::lit(0.381_966_011_250_105_1);
    let (mut a, mut b) = (a.min(b), a.max(b));
    let (mut x, mut w, mut v) = (x, x, x);
    let (mut fx, mut fw, mut fv) = (fx, fx, fx);
    let mut d = T::zero();
    let mut e = T::zero();
    let mut evaluations = 0;
    for _ in 0..max_iter {
        let xm = T::half() * (a + b);
        let tol1 = xtol + T::epsilon().sqrt() * T::lit(1e-3) * x.abs();
        let tol2 = T::two() * tol1;
        if (x - xm).abs() <= tol2 - T::half() * (b - a) {
            break;
        }
        let mut golden_step = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = T::two() * (q - r);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            let previous = e;
            e = d;
            if !(p.abs() >= (T::half() * q * previous).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x >= xm { a - x } else { b - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u)?;
        evaluations += 1;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok(Minimum { x, value: fx, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn ok(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<f64, Infallible> {
        move |x| Ok(f(x))
    }

    #[test]
    fn finds_cosine_root_within_tolerance() {
        let f = |x: f64| x.cos();
        let root = brent_root(ok(f), 1.0, 2.0, f(1.0), f(2.0), 1e-12, 100).unwrap();
        assert!((root.x - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(root.hi - root.lo <= 1e-12 + 1e-15);
        assert!(root.lo >= 1.0 && root.hi <= 2.0);
    }

    #[test]
    fn relative_tolerance_above_one() {
        let f = |x: f64| x - 1234.5678;
        let tol = scaled_tolerance(1e-10, 1000.0);
        let root = brent_root(ok(f), 1000.0, 2000.0, f(1000.0), f(2000.0), tol, 100).unwrap();
        assert!((root.x - 1234.5678).abs() <= 1234.5678 * 1e-10);
    }

    #[test]
    fn rejects_same_sign_bracket() {
        let f = |x: f64| x * x + 1.0;
        let err = brent_root(ok(f), -1.0, 1.0, f(-1.0), f(1.0), 1e-12, 100).unwrap_err();
        assert!(matches!(err, BracketError::NoSignChange { .. }));
    }

    #[test]
    fn stays_inside_bracket_for_steep_function() {
        let f = |x: f64| (x - 0.3).powi(3) * 1e6 + 1e-3;
        let mut inside = true;
        let g = |x: f64| {
            inside &= (0.0..=1.0).contains(&x);
            Ok::<_, Infallible>(f(x))
        };
        let root = brent_root(g, 0.0, 1.0, f(0.0), f(1.0), 1e-13, 200).unwrap();
        assert!(inside);
        assert!(f(root.x).abs() < 1e-6);
    }

    #[test]
    fn minimizes_shifted_parabola() {
        let f = |x: f64| (x - 0.7).powi(2) + 3.0;
        let m = brent_minimize(ok(f), 0.0, 2.0, 1.0, f(1.0), 1e-10, 200).unwrap();
        assert!((m.x - 0.7).abs() < 1e-7);
        assert!((m.value - 3.0).abs() < 1e-15);
    }

    #[test]
    fn minimizes_cosine_near_pi() {
        let f = |x: f64| x.cos();
        let m = brent_minimize(ok(f), 2.5, 3.6, 3.0, f(3.0), 1e-10, 200).unwrap();
        assert!((m.x - std::f64::consts::PI).abs() < 1e-8);
        assert!((m.value + 1.0).abs() < 1e-15);
    }
}
