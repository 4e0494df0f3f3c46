//! Binomial series for the elliptic integrals and the moments
//! `I_2n(x) = ∫_0^x t^{2n} / sqrt(1 - t^2) dt`.
//!
//! Every series is summed until a ratio-test tail estimate drops below the
//! requested tolerance. The small-modulus forms are only accepted for
//! `k <= 0.5` and the large-modulus forms for `k' <= 0.5`, where the terms
//! shrink at least by a factor of four.

use super::EllipticModulusPair;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest `k` (or `k'` for the large-modulus forms) the series accept.
pub const SERIES_CUTOFF: f64 = 0.5;

/// Truncation policy for a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation<T> {
    pub max_terms: usize,
    pub tail_tolerance: T,
}

impl<T: Real> SeriesTruncation<T> {
    pub fn new(max_terms: usize, tail_tolerance: T) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::InvalidParameter("series needs at least one term".into()));
        }
        if !(tail_tolerance > T::zero()) {
            return Err(Error::InvalidParameter(format!("tail tolerance {tail_tolerance} must be positive")));
        }
        Ok(SeriesTruncation { max_terms, tail_tolerance })
    }

    /// Up to `max_terms` terms, failing only if the tail estimate after the
    /// last one still exceeds `1e-6`.
    pub fn terms(max_terms: usize) -> Self {
        SeriesTruncation { max_terms: max_terms.max(1), tail_tolerance: T::lit(1e-6) }
    }
}

impl<T: Real> Default for SeriesTruncation<T> {
    fn default() -> Self {
        SeriesTruncation { max_terms: 400, tail_tolerance: T::epsilon() * T::lit(8.0) }
    }
}

/// Central binomial weights `c_n = (2n)! / (4^n n!^2)`, built by
/// `c_n = c_{n-1} (2n - 1) / (2n)`.
fn binomial_weights<T: Real>(count: usize) -> Vec<T> {
    let mut c = Vec::with_capacity(count);
    let mut cur = T::one();
    for n in 0..count {
        if n > 0 {
            let two_n = T::from_usize_lossy(2 * n);
            cur = cur * (two_n - T::one()) / two_n;
        }
        c.push(cur);
    }
    c
}

/// Running sum with a geometric tail estimate from the last two terms.
struct TailSum<T> {
    sum: T,
    last: Option<T>,
    tail: T,
    fallback_ratio: T,
}

impl<T: Real> TailSum<T> {
    fn new(fallback_ratio: T) -> Self {
        TailSum { sum: T::zero(), last: None, tail: T::infinity(), fallback_ratio }
    }

    fn push(&mut self, term: T) {
        self.sum = self.sum + term;
        let ratio = match self.last {
            Some(prev) if prev != T::zero() => (term / prev).abs(),
            Some(_) => T::zero(),
            None => self.fallback_ratio,
        };
        self.tail = if ratio < T::one() { term.abs() * ratio / (T::one() - ratio) } else { T::infinity() };
        self.last = Some(term);
    }

    // Early exit once the tail is below both the tolerance and rounding;
    // otherwise all `max_terms` terms are used and the tolerance is checked
    // at the end.
    fn converged(&self, trunc: SeriesTruncation<T>) -> bool {
        self.tail <= trunc.tail_tolerance.min(T::epsilon() * self.sum.abs())
    }
}

fn finish<T: Real>(op: &'static str, s: TailSum<T>, terms: usize, trunc: SeriesTruncation<T>) -> Result<T> {
    if s.tail <= trunc.tail_tolerance {
        Ok(s.sum)
    } else {
        Err(Error::NonConvergence { op, terms, tail: s.tail.as_f64() })
    }
}

fn check_x<T: Real>(op: &'static str, x: T) -> Result<()> {
    if x >= T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("x = {x} not in [0, 1]")))
    }
}

fn small_modulus<T: Real>(op: &'static str, k: T) -> Result<EllipticModulusPair<T>> {
    let m = EllipticModulusPair::new(k)?;
    if m.k() > T::lit(SERIES_CUTOFF) {
        return Err(Error::domain(op, format!("k = {k} above the series cutoff {SERIES_CUTOFF}")));
    }
    Ok(m)
}

fn large_modulus<T: Real>(op: &'static str, m: EllipticModulusPair<T>) -> Result<EllipticModulusPair<T>> {
    if m.k_prime() > T::lit(SERIES_CUTOFF) {
        return Err(Error::domain(op, format!("k' = {} above the series cutoff {SERIES_CUTOFF}", m.k_prime())));
    }
    Ok(m)
}

/// `I_2n(x)`.
pub fn i2n<T: Real>(n: usize, x: T) -> Result<T> {
    Ok(i2n_table(n, x)?[n])
}

/// `[I_0(x), I_2(x), ..., I_2n(x)]`.
///
/// The upward recursion subtracts nearly equal numbers once `I_2n` has
/// decayed, so for `x` away from 1 the table is built downward, starting far
/// enough above `n` that the (zero) starting guess is below rounding.
pub fn i2n_table<T: Real>(n: usize, x: T) -> Result<Vec<T>> {
    check_x("i2n", x)?;
    if x == T::zero() {
        return Ok(vec![T::zero(); n + 1]);
    }
    let root = ((T::one() - x) * (T::one() + x)).sqrt();
    let pad = if x < T::one() {
        let p = (T::epsilon() * T::lit(1e-3)).ln() / (T::lit(2.0) * x.ln());
        p.to_f64().filter(|p| p.is_finite() && *p < 8192.0).map(|p| p.ceil() as usize + 8)
    } else {
        None
    };
    let mut table = vec![T::zero(); n + 1];
    match pad {
        Some(pad) => {
            let top = n + pad;
            let mut cur = T::zero();
            for m in (1..=top).rev() {
                let two_m = T::from_usize_lossy(2 * m);
                let pow = x.powi((2 * m - 1) as i32);
                cur = two_m / (two_m - T::one()) * (cur + pow * root / two_m);
                if m - 1 <= n {
                    table[m - 1] = cur;
                }
            }
            // the downward sweep also reproduces I_0 = asin(x); use the exact
            // value for the base since it costs nothing
            table[0] = x.asin();
        }
        None => {
            table[0] = x.asin();
            let mut pow = x;
            for m in 1..=n {
                let two_m = T::from_usize_lossy(2 * m);
                table[m] = (two_m - T::one()) / two_m * table[m - 1] - pow * root / two_m;
                pow = pow * x * x;
            }
        }
    }
    Ok(table)
}

/// `F(x, k) = Σ c_n k^{2n} I_2n(x)`.
pub fn series_f<T: Real>(x: T, k: T, trunc: SeriesTruncation<T>) -> Result<T> {
    check_x("series_f", x)?;
    let m = small_modulus("series_f", k)?;
    incomplete_series("series_f", x, m.k(), trunc, |_, w| w)
}

/// `E(x, k) = -Σ c_n k^{2n} I_2n(x) / (2n - 1)`.
pub fn series_e<T: Real>(x: T, k: T, trunc: SeriesTruncation<T>) -> Result<T> {
    check_x("series_e", x)?;
    let m = small_modulus("series_e", k)?;
    incomplete_series("series_e", x, m.k(), trunc, |n, w| -w / (T::from_usize_lossy(2 * n) - T::one()))
}

fn incomplete_series<T: Real>(
    op: &'static str,
    x: T,
    k: T,
    trunc: SeriesTruncation<T>,
    weight: impl Fn(usize, T) -> T,
) -> Result<T> {
    if x == T::zero() {
        return Ok(T::zero());
    }
    let moments = i2n_table(trunc.max_terms - 1, x)?;
    let c = binomial_weights::<T>(trunc.max_terms);
    let k2 = k * k;
    let mut s = TailSum::new(k2);
    let mut kp = T::one();
    for n in 0..trunc.max_terms {
        s.push(weight(n, c[n] * kp) * moments[n]);
        if s.converged(trunc) {
            return Ok(s.sum);
        }
        kp = kp * k2;
    }
    finish(op, s, trunc.max_terms, trunc)
}

/// `K(k) = (π/2) Σ c_n^2 k^{2n}` for `k <= 0.5`.
pub fn complete_k_small_series<T: Real>(k: T, trunc: SeriesTruncation<T>) -> Result<T> {
    let m = small_modulus("complete_k_small_series", k)?;
    complete_small("complete_k_small_series", m.k(), trunc, |_| T::one())
}

/// `E(k) = -(π/2) Σ c_n^2 k^{2n} / (2n - 1)` for `k <= 0.5`.
pub fn complete_e_small_series<T: Real>(k: T, trunc: SeriesTruncation<T>) -> Result<T> {
    let m = small_modulus("complete_e_small_series", k)?;
    complete_small("complete_e_small_series", m.k(), trunc, |n| {
        -T::one() / (T::from_usize_lossy(2 * n) - T::one())
    })
}

fn complete_small<T: Real>(
    op: &'static str,
    k: T,
    trunc: SeriesTruncation<T>,
    factor: impl Fn(usize) -> T,
) -> Result<T> {
    let c = binomial_weights::<T>(trunc.max_terms);
    let k2 = k * k;
    let mut s = TailSum::new(k2);
    let mut kp = T::one();
    for n in 0..trunc.max_terms {
        s.push(c[n] * c[n] * kp * factor(n) * T::FRAC_PI_2());
        if s.converged(trunc) {
            return Ok(s.sum);
        }
        kp = kp * k2;
    }
    finish(op, s, trunc.max_terms, trunc)
}

/// `K(k) = (2/π) K'(k) ln(4/k') - Σ_{n>=1} c_n^2 k'^{2n} Σ_{m=1}^n 1/(m(2m-1))`
/// for `k' <= 0.5`, with `(2/π) K'` expanded as `Σ c_n^2 k'^{2n}`.
pub fn complete_k_large_series<T: Real>(k: T, trunc: SeriesTruncation<T>) -> Result<T> {
    let m = large_modulus("complete_k_large_series", EllipticModulusPair::new(k)?)?;
    complete_k_large_series_pair(m, trunc)
}

/// `E(k)` from the large-modulus expansion in `k'`, for `k' <= 0.5`.
pub fn complete_e_large_series<T: Real>(k: T, trunc: SeriesTruncation<T>) -> Result<T> {
    let m = large_modulus("complete_e_large_series", EllipticModulusPair::new(k)?)?;
    complete_e_large_series_pair(m, trunc)
}

pub fn complete_k_large_series_pair<T: Real>(m: EllipticModulusPair<T>, trunc: SeriesTruncation<T>) -> Result<T> {
    let m = large_modulus("complete_k_large_series", m)?;
    complete_large("complete_k_large_series", m.k_prime(), trunc, |_, log_part| log_part)
}

pub fn complete_e_large_series_pair<T: Real>(m: EllipticModulusPair<T>, trunc: SeriesTruncation<T>) -> Result<T> {
    let m = large_modulus("complete_e_large_series", m)?;
    // (2/π)(K' - E') = Σ c_n^2 k'^{2n} 2n/(2n-1), so the three sums combine
    // termwise into c_n^2 k'^{2n} [2n/(2n-1) (L - b_n) + 1/(2n-1)^2].
    complete_large("complete_e_large_series", m.k_prime(), trunc, |n, log_part| {
        let odd = T::from_usize_lossy(2 * n) - T::one();
        T::from_usize_lossy(2 * n) / odd * log_part + T::one() / (odd * odd)
    })
}

fn complete_large<T: Real>(
    op: &'static str,
    kp: T,
    trunc: SeriesTruncation<T>,
    bracket: impl Fn(usize, T) -> T,
) -> Result<T> {
    let c = binomial_weights::<T>(trunc.max_terms);
    let log4 = (T::lit(4.0) / kp).ln();
    let kp2 = kp * kp;
    let mut s = TailSum::new(kp2);
    let mut pow = T::one();
    let mut harmonic = T::zero();
    for n in 0..trunc.max_terms {
        if n > 0 {
            let nf = T::from_usize_lossy(n);
            harmonic = harmonic + T::one() / (nf * (T::lit(2.0) * nf - T::one()));
        }
        s.push(c[n] * c[n] * pow * bracket(n, log4 - harmonic));
        if s.converged(trunc) {
            return Ok(s.sum);
        }
        pow = pow * kp2;
    }
    finish(op, s, trunc.max_terms, trunc)
}
