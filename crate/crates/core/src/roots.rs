//! Bracketed scalar root finding and golden-section minimisation.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Termination rule for [`brent`].
#[derive(Debug, Clone, Copy)]
pub struct RootOptions<T> {
    /// Stop once `|f(x)| <= f_tol`.
    pub f_tol: T,
    /// Stop once the bracket is narrower than `x_tol` (absolute).
    pub x_tol: T,
    pub max_iter: usize,
}

/// Brent–Dekker root finder on a bracket `[a, b]` with `f(a)·f(b) <= 0`.
///
/// `fa`, `fb` are the already known endpoint values. The closure may fail
/// (quadrature errors propagate).
pub fn brent<T, F>(mut f: F, mut a: T, mut b: T, mut fa: T, mut fb: T, opts: &RootOptions<T>, op: &'static str) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if fa.abs() <= opts.f_tol {
        return Ok(a);
    }
    if fb.abs() <= opts.f_tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { op, detail: format!("f({a:e})={fa:e}, f({b:e})={fb:e}") });
    }
    let two: T = lit(2.0);
    let half: T = lit(0.5);
    let eps = T::epsilon();
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..opts.max_iter {
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
        let tol1 = two * eps * b.abs() + half * opts.x_tol;
        let xm = half * (c - b);
        if fb.abs() <= opts.f_tol || xm.abs() <= tol1 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = lit::<T>(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
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
        b = if d.abs() > tol1 { b + d } else { b + tol1 * xm.signum() };
        fb = f(b)?;
    }
    Ok(b)
}

/// Minimises a unimodal function on `[a, b]`; returns `(x_min, f(x_min))`.
pub fn golden_min<T, F>(mut f: F, mut a: T, mut b: T, iters: usize) -> Result<(T, T)>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let inv_phi: T = lit(0.618_033_988_749_894_9);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
        if (b - a).abs() <= T::epsilon() * lit(4.0) * (a.abs() + b.abs()) {
            break;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}
