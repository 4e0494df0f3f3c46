//! Bracketing root finder: bisection followed by safeguarded secant steps.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct BracketOptions<T> {
    /// Absolute tolerance on the root location.
    pub x_tol: T,
    /// Bisection stops (and secant polishing starts) once the bracket is
    /// narrower than this.
    pub bisect_until: T,
    pub max_iter: usize,
}

impl<T: Real> Default for BracketOptions<T> {
    fn default() -> Self {
        BracketOptions {
            x_tol: T::epsilon() * T::lit(16.0),
            bisect_until: T::lit(1e-3),
            max_iter: 400,
        }
    }
}

/// Finds a sign change of `f` on a uniform scan of `[lo, hi]` with `n`
/// sub-intervals. Returns the first bracketing sub-interval.
pub fn scan_bracket<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, n: usize) -> Option<(T, T)> {
    let n = n.max(1);
    let step = (hi - lo) / T::from_usize_lossy(n);
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + step * T::from_usize_lossy(i) };
        let f1 = f(x1);
        if f0 == T::zero() {
            return Some((x0, x0));
        }
        if f0.is_finite() && f1.is_finite() && (f0 < T::zero()) != (f1 < T::zero()) {
            return Some((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == T::zero() {
        return Some((x0, x0));
    }
    None
}

/// Root of `f` inside `[lo, hi]`, which must bracket a sign change.
pub fn bisect_secant<T: Real, F: FnMut(T) -> T>(
    op: &'static str,
    mut f: F,
    lo: T,
    hi: T,
    opts: BracketOptions<T>,
) -> Result<T> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || (fa < T::zero()) == (fb < T::zero()) {
        return Err(Error::Bracket { op, lo: a.as_f64(), hi: b.as_f64() });
    }
    let half = T::lit(0.5);
    let mut iter = 0;
    while b - a > opts.bisect_until && iter < opts.max_iter {
        let m = (a + b) * half;
        let fm = f(m);
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
        iter += 1;
    }
    // Illinois-modified regula falsi keeps the bracket while converging
    // superlinearly.
    let mut side = 0i8;
    while iter < opts.max_iter {
        let width = b - a;
        if width <= opts.x_tol.max(T::epsilon() * T::lit(4.0) * a.abs().max(b.abs())) {
            return Ok((a + b) * half);
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !x.is_finite() || x <= a || x >= b {
            x = (a + b) * half;
        }
        let fx = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if (fx < T::zero()) == (fa < T::zero()) {
            a = x;
            fa = fx;
            if side == -1 {
                fb = fb * half;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa = fa * half;
            }
            side = 1;
        }
        iter += 1;
    }
    Err(Error::IterationLimit { op, step: (b - a).as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect_secant("t", |x: f64| x * x - 2.0, 0.0, 2.0, BracketOptions::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn transcendental_with_wide_scale() {
        // e^{s} = 1e20 on s in [0, 60]
        let target = 1e20f64.ln();
        let r = bisect_secant("t", |s: f64| s.exp().ln() - target, 0.0, 60.0, BracketOptions::default()).unwrap();
        assert!((r - target).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change_is_reported() {
        let e = bisect_secant("t", |x: f64| x * x + 1.0, -1.0, 1.0, BracketOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Bracket { .. }));
    }

    #[test]
    fn scan_finds_first_bracket() {
        let (a, b) = scan_bracket(|x: f64| (x - 0.37) * (x - 0.8), 0.0, 1.0, 10).unwrap();
        assert!(a <= 0.37 && 0.37 <= b);
        assert!(scan_bracket(|x: f64| x * x + 1.0, -1.0, 1.0, 10).is_none());
    }
}
