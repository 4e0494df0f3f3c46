//! Analytic moduli of the three-segment configuration.
//!
//! The map
//!
//! ```text
//! ζ(w) = C ∫_0^w (1/λ² - t²) dt / sqrt((1 - t²)(1 - k² t²))
//!      = (C/k²) [E(w, k) - (1 - k²/λ²) F(w, k)]
//! ```
//!
//! sends the upper half-plane onto the upper half of the exterior of two
//! vertical slits of half-height `β` at `±αH` joined by a horizontal
//! segment. With `1/λ² = E'/(k² K')` the image of `1/λ` is the slit tip.
//!
//! Points `t ∈ [1, 1/k]` on the slit are parametrised by
//! `s = sqrt(1 - k² t²) / k'`, which runs from `1` at the slit base to
//! `ℓ'` at the tip, so that the slit height is
//! `(C/k²) [E(s, k') - (k²/λ²) F(s, k')]`. Working in `s` (and in
//! `1 - k`, `k'`) keeps every quantity accurate when `k` is within
//! rounding of 1.

use num_complex::Complex;
use serde::Serialize;

use crate::elliptic::{
    i2n_table, incomplete_e_pair, incomplete_f_minus_e_pair, incomplete_f_pair, EllipticModulusPair,
};
use crate::error::{Error, Result};
use crate::roots::{bisect_secant, scan_bracket, BracketOptions};
use crate::scalar::Real;

/// Bracket for `s = ln(1/(1 - k))` when solving for `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions<T> {
    pub s_min: T,
    pub s_max: T,
    pub scan_intervals: usize,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions { s_min: T::LN_2(), s_max: T::lit(60.0), scan_intervals: 64 }
    }
}

/// Parameters of the canonical configuration at one stretch factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlitParameters<T> {
    pub h: T,
    pub alpha: T,
    pub beta: T,
    pub sigma: T,
    pub k: T,
    pub k_prime: T,
    /// `1 - k`, kept separately since `k` rounds to 1 for large `H`.
    pub one_minus_k: T,
    pub lambda: T,
    pub one_minus_lambda: T,
    pub mu: T,
    pub one_minus_mu: T,
    pub ell: T,
    pub ell_prime: T,
    /// Slit coordinate of the preimage of the `σ`-height point.
    pub s_mu: T,
    pub c: T,
    /// `k²/λ² = E'(k)/K'(k)`.
    pub ratio: T,
}

impl<T: Real> SlitParameters<T> {
    pub fn modulus_pair(&self) -> EllipticModulusPair<T> {
        pair_from(self.k, self.k_prime)
    }

    /// `(1 - λ)/(1 - k)`.
    pub fn r1(&self) -> T {
        self.one_minus_lambda / self.one_minus_k
    }

    /// `(1 - μ)/(1 - k)`.
    pub fn r2(&self) -> T {
        self.one_minus_mu / self.one_minus_k
    }

    /// `ln(1/(1 - k))`.
    pub fn log_inverse_one_minus_k(&self) -> T {
        -self.one_minus_k.ln()
    }
}

fn pair_from<T: Real>(k: T, k_prime: T) -> EllipticModulusPair<T> {
    EllipticModulusPair::from_complement(k_prime)
        .or_else(|_| EllipticModulusPair::new(k))
        .expect("modulus pair inside (0, 1)")
}

/// Quantities depending on `k` only.
#[derive(Debug, Clone, Copy)]
struct Core<T> {
    m: EllipticModulusPair<T>,
    /// `k²/λ² = E'/K'`.
    ratio: T,
    ell_prime: T,
    /// `E(k) - (1 - k²/λ²) K(k)`.
    numerator: T,
    /// `E(ℓ', k') - (k²/λ²) F(ℓ', k')`.
    denominator: T,
}

impl<T: Real> Core<T> {
    fn new(m: EllipticModulusPair<T>) -> Self {
        let mc = m.complement();
        let kp_big = mc.complete_k();
        let one_minus_ratio = mc.complete_k_minus_e() / kp_big;
        let ratio = T::one() - one_minus_ratio;
        let kp = m.k_prime();
        let ell_prime = (one_minus_ratio.sqrt() / kp).min(T::one());
        let numerator = m.complete_e() - one_minus_ratio * m.complete_k();
        let denominator = slit_bracket(ell_prime, mc, one_minus_ratio);
        Core { m, ratio, ell_prime, numerator, denominator }
    }

    fn lambda_terms(&self, s: T) -> (T, T) {
        slit_point(self.m, s)
    }
}

/// `E(s, k') - (k²/λ²) F(s, k')` written as `(1 - k²/λ²) F - (F - E)`.
fn slit_bracket<T: Real>(s: T, mc: EllipticModulusPair<T>, one_minus_ratio: T) -> T {
    one_minus_ratio * incomplete_f_pair(s, mc) - incomplete_f_minus_e_pair(s, mc)
}

/// `(x, 1 - x)` for `x = k / sqrt(1 - k'² s²)`, the reciprocal of the real
/// preimage `t` with slit coordinate `s`.
fn slit_point<T: Real>(m: EllipticModulusPair<T>, s: T) -> (T, T) {
    let kp = m.k_prime();
    let w = ((T::one() - kp * s) * (T::one() + kp * s)).sqrt();
    let x = m.k() / w;
    let one_minus = kp * kp * (T::one() - s) * (T::one() + s) / ((w + m.k()) * w);
    (x, one_minus)
}

/// `λ = k sqrt(K'(k)/E'(k))`.
pub fn lambda_from_k<T: Real>(k: T) -> Result<T> {
    let m = EllipticModulusPair::new(k)?;
    Ok(m.k() * (m.complete_k_prime() / m.complete_e_prime()).sqrt())
}

/// `(1 - λ)` for the pair, accurate near `k = 1`.
pub fn one_minus_lambda<T: Real>(m: EllipticModulusPair<T>) -> T {
    let core = Core::new(m);
    core.lambda_terms(core.ell_prime).1
}

/// `[E(k) - (1 - k²/λ²)K(k)] / [E(ℓ', k') - (k²/λ²)F(ℓ', k')]`, which must
/// equal `Hα/β`.
pub fn parameter_ratio<T: Real>(m: EllipticModulusPair<T>) -> T {
    let c = Core::new(m);
    c.numerator / c.denominator
}

fn pair_at_log<T: Real>(s: T) -> Result<EllipticModulusPair<T>> {
    EllipticModulusPair::from_one_minus_k((-s).exp())
}

/// Solves the parameter system for `k`, `λ`, `C` given `H`, `α`, `β`. The
/// returned parameters have `σ = β` (so `μ = λ`).
pub fn solve_k_for_h<T: Real>(h: T, alpha: T, beta: T) -> Result<SlitParameters<T>> {
    solve_k_for_h_with(h, alpha, beta, SolveOptions::default())
}

pub fn solve_k_for_h_with<T: Real>(h: T, alpha: T, beta: T, opts: SolveOptions<T>) -> Result<SlitParameters<T>> {
    for (name, v) in [("H", h), ("alpha", alpha), ("beta", beta)] {
        if !(v > T::zero() && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
        }
    }
    let target = h * alpha / beta;
    // compare logarithms: the ratio spans many decades in s
    let ln_target = target.ln();
    let residual = |s: T| match pair_at_log(s) {
        Ok(m) => parameter_ratio(m).ln() - ln_target,
        Err(_) => T::nan(),
    };
    let (lo, hi) = scan_bracket(residual, opts.s_min, opts.s_max, opts.scan_intervals).ok_or(Error::Bracket {
        op: "solve_k_for_h",
        lo: opts.s_min.as_f64(),
        hi: opts.s_max.as_f64(),
    })?;
    let s = if lo == hi {
        lo
    } else {
        let bo = BracketOptions { x_tol: T::epsilon() * T::lit(64.0) * hi, ..BracketOptions::default() };
        bisect_secant("solve_k_for_h", residual, lo, hi, bo)?
    };
    let m = pair_at_log(s)?;
    let core = Core::new(m);
    let (lambda, one_minus_lambda) = core.lambda_terms(core.ell_prime);
    let k = m.k();
    let c = h * alpha * k * k / core.numerator;
    let ell = (T::one() - core.ell_prime * core.ell_prime).max(T::zero()).sqrt();
    Ok(SlitParameters {
        h,
        alpha,
        beta,
        sigma: beta,
        k,
        k_prime: m.k_prime(),
        one_minus_k: m.one_minus_k(),
        lambda,
        one_minus_lambda,
        mu: lambda,
        one_minus_mu: one_minus_lambda,
        ell,
        ell_prime: core.ell_prime,
        s_mu: core.ell_prime,
        c,
        ratio: core.ratio,
    })
}

/// Height of the slit at slit coordinate `s ∈ [0, 1]`.
fn height_at_s<T: Real>(p: &SlitParameters<T>, s: T) -> T {
    let m = p.modulus_pair();
    let one_minus_ratio = T::one() - p.ratio;
    p.c / (p.k * p.k) * slit_bracket(s, m.complement(), one_minus_ratio)
}

/// `ζ(w)` for real `w ∈ [0, 1/k]`: real on `[0, 1]`, `αH + i·height` on
/// the slit beyond.
pub fn zeta_eval<T: Real>(w: T, p: &SlitParameters<T>) -> Result<Complex<T>> {
    let m = p.modulus_pair();
    if w >= T::zero() && w <= T::one() {
        let v = p.c / (p.k * p.k) * (incomplete_e_pair(w, m) - (T::one() - p.ratio) * incomplete_f_pair(w, m));
        return Ok(Complex::new(v, T::zero()));
    }
    if w > T::one() && w * p.k <= T::one() {
        let s = slit_coordinate(p, w);
        return Ok(Complex::new(p.alpha * p.h, height_at_s(p, s)));
    }
    Err(Error::domain("zeta_eval", format!("w = {w} outside [0, 1/k]")))
}

fn slit_coordinate<T: Real>(p: &SlitParameters<T>, t: T) -> T {
    let kt = p.k * t;
    (((T::one() - kt) * (T::one() + kt)).max(T::zero()).sqrt() / p.k_prime).min(T::one())
}

/// Height of the image of `t ∈ [1, 1/λ]` on the right slit.
pub fn height_on_slit<T: Real>(t: T, p: &SlitParameters<T>) -> Result<T> {
    if !(t >= T::one() && t * p.lambda <= T::one() * (T::one() + T::epsilon() * T::lit(4.0))) {
        return Err(Error::domain("height_on_slit", format!("t = {t} outside [1, 1/λ]")));
    }
    Ok(height_at_s(p, slit_coordinate(p, t).max(p.ell_prime)))
}

/// The slit height by direct quadrature of the defining integral along the
/// slit preimage, `u = cosh θ` removing the square-root singularity at 1.
pub fn height_on_slit_quadrature<T: Real>(t: T, p: &SlitParameters<T>) -> Result<T> {
    if !(t >= T::one() && t * p.k < T::one()) {
        return Err(Error::domain("height_on_slit_quadrature", format!("t = {t} outside [1, 1/k)")));
    }
    let inv_l2 = p.ratio_inverse_lambda_sq();
    let k2 = p.k * p.k;
    let r = crate::quadrature::integrate(
        |th: T| {
            let u2 = th.cosh().powi(2);
            (inv_l2 - u2) / (T::one() - k2 * u2).sqrt()
        },
        T::zero(),
        t.acosh(),
        crate::quadrature::QuadOptions::default(),
    )?;
    Ok(p.c * r.value)
}

impl<T: Real> SlitParameters<T> {
    fn ratio_inverse_lambda_sq(&self) -> T {
        self.ratio / (self.k * self.k)
    }
}

/// Height from the closed form, checked against quadrature; the quadrature
/// value is returned (with a warning) if they differ by more than `1e-6`
/// relative to `β`.
pub fn height_on_slit_validated<T: Real>(t: T, p: &SlitParameters<T>) -> Result<T> {
    let closed = height_on_slit(t, p)?;
    let quad = height_on_slit_quadrature(t, p)?;
    if (closed - quad).abs() > T::lit(1e-6) * p.beta {
        log::warn!("slit height at t = {t}: closed form {closed} vs quadrature {quad}; using quadrature");
        return Ok(quad);
    }
    Ok(closed)
}

/// Finds `μ` with `height_on_slit(1/μ) = σ` and returns the parameters with
/// `σ`, `μ` filled in.
pub fn solve_mu_for_sigma<T: Real>(p: &SlitParameters<T>, sigma: T) -> Result<SlitParameters<T>> {
    if !(sigma > T::zero() && sigma <= p.beta) {
        return Err(Error::InvalidParameter(format!("sigma = {sigma} must lie in (0, beta = {}]", p.beta)));
    }
    let mut out = *p;
    out.sigma = sigma;
    if sigma == p.beta {
        out.s_mu = p.ell_prime;
        out.mu = p.lambda;
        out.one_minus_mu = p.one_minus_lambda;
        return Ok(out);
    }
    // height decreases from β at s = ℓ' to 0 at s = 1; solve relative to β
    let f = |s: T| height_at_s(p, s) / p.beta - sigma / p.beta;
    let bo = BracketOptions { x_tol: T::epsilon() * T::lit(16.0), ..BracketOptions::default() };
    let s = bisect_secant("solve_mu_for_sigma", f, p.ell_prime, T::one(), bo)?;
    let (mu, one_minus_mu) = slit_point(p.modulus_pair(), s);
    out.s_mu = s;
    out.mu = mu;
    out.one_minus_mu = one_minus_mu;
    Ok(out)
}

/// Full solve: `k`, `λ`, `C` from `(H, α, β)` then `μ` from `σ`.
pub fn solve<T: Real>(h: T, alpha: T, beta: T, sigma: T) -> Result<SlitParameters<T>> {
    solve_mu_for_sigma(&solve_k_for_h(h, alpha, beta)?, sigma).map_err(|e| e.at_stretch(h.as_f64()))
}

/// Modulus pair `(k/μ, (k/μ)')`. Since `k/μ = sqrt(1 - k'² s_μ²)`, the
/// complement is exactly `k' s_μ`.
pub fn kappa_pair<T: Real>(p: &SlitParameters<T>) -> EllipticModulusPair<T> {
    pair_from((T::one() - (p.k_prime * p.s_mu).powi(2)).sqrt(), p.k_prime * p.s_mu)
}

/// `K(κ)/K'(κ)`.
pub fn modulus_from_kappa<T: Real>(m: EllipticModulusPair<T>) -> T {
    m.complete_k() / m.complete_k_prime()
}

/// `Mod(G*_3H) = K(k/μ)/K'(k/μ)`.
pub fn mod_gstar3h<T: Real>(p: &SlitParameters<T>) -> T {
    modulus_from_kappa(kappa_pair(p))
}

/// `(1/π) ln(1/(1 - k))`.
pub fn asym_lower<T: Real>(p: &SlitParameters<T>) -> T {
    p.log_inverse_one_minus_k() / T::PI()
}

/// `(r1, r2)` along a list of stretch factors.
pub fn delta_ratios<T: Real>(hs: &[T], alpha: T, beta: T, sigma: T) -> Result<Vec<(T, T)>> {
    hs.iter()
        .map(|&h| {
            let p = solve(h, alpha, beta, sigma)?;
            Ok((p.r1(), p.r2()))
        })
        .collect()
}

/// Limits of `(r1, r2)` as `H → ∞`, from the slit half-plane map
/// `z ↦ β sqrt((2z - 1)² - 1)`: `δ1 = 1/2`, `δ2 = (1 - sqrt(1 - σ²/β²))/2`.
pub fn delta_limits<T: Real>(beta: T, sigma: T) -> (T, T) {
    let half = T::lit(0.5);
    let q = sigma / beta;
    (half, half * (T::one() - ((T::one() - q) * (T::one() + q)).sqrt()))
}

/// `E(k) - (1 - k²/λ²) K(k)`, which tends to 1.
pub fn numerator_value<T: Real>(p: &SlitParameters<T>) -> T {
    Core::new(p.modulus_pair()).numerator
}

/// `[K(k')E(ℓ',k') - E(k')F(ℓ',k')] / [(π/4)(I_0(ℓ') - 2 I_2(ℓ')) k'²]`,
/// which tends to 1.
pub fn denominator_ratio<T: Real>(p: &SlitParameters<T>) -> Result<T> {
    let m = p.modulus_pair();
    let mc = m.complement();
    let core = Core::new(m);
    let full = mc.complete_k() * core.denominator;
    let moments = i2n_table(1, p.ell_prime)?;
    let lead = T::FRAC_PI_4() * (moments[0] - T::lit(2.0) * moments[1]) * p.k_prime * p.k_prime;
    Ok(full / lead)
}

/// `(1 - k/μ) / ((1 - r2)(1 - k))`, which tends to 1.
pub fn kappa_gap_ratio<T: Real>(p: &SlitParameters<T>) -> T {
    let kp = kappa_pair(p);
    let one_minus_kappa = kp.one_minus_k();
    one_minus_kappa / ((T::one() - p.r2()) * p.one_minus_k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};

    // ζ(end) by quadrature of the defining integrand along the half circle
    // from 0 to `end` through the upper half-plane, with the principal
    // branch of each square-root factor.
    fn contour_zeta(p: &SlitParameters<f64>, end: f64) -> Complex<f64> {
        let inv_l2 = p.ratio / (p.k * p.k);
        let k = p.k;
        let one = Complex::new(1.0, 0.0);
        let integrand = |phi: f64| {
            let e = Complex::new(0.0, -phi).exp();
            let w = (one - e) * (end / 2.0);
            let dw = Complex::new(0.0, -1.0) * (-e) * (end / 2.0);
            let den = (one - w).sqrt() * (one + w).sqrt() * (one - w * k).sqrt() * (one + w * k).sqrt();
            (Complex::new(inv_l2, 0.0) - w * w) / den * dw * p.c
        };
        let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_intervals: 20000 };
        let re = integrate(|phi| integrand(phi).re, 0.0, std::f64::consts::PI, opts).unwrap().value;
        let im = integrate(|phi| integrand(phi).im, 0.0, std::f64::consts::PI, opts).unwrap().value;
        Complex::new(re, im)
    }

    fn params(h: f64) -> SlitParameters<f64> {
        solve(h, 1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn lambda_interval_and_limit() {
        let l = lambda_from_k(0.99f64).unwrap();
        assert!(l > 0.99 && l < 1.0);
        let l = lambda_from_k(1.0 - 1e-10f64).unwrap();
        assert!((l - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zeta_endpoints() {
        let p = params(10.0);
        assert_eq!(zeta_eval(0.0, &p).unwrap(), Complex::new(0.0, 0.0));
        assert!((zeta_eval(1.0, &p).unwrap().re - 10.0).abs() < 1e-10);
        let tip = zeta_eval(1.0 / p.lambda, &p).unwrap();
        assert!((tip.re - 10.0).abs() < 1e-12 && (tip.im - 1.0).abs() < 1e-9);
        assert!(zeta_eval(1.0 / p.k * 1.01, &p).is_err());
    }

    #[test]
    fn zeta_matches_contour_quadrature() {
        let p = params(10.0);
        let z = contour_zeta(&p, 0.5);
        assert!((z.re - zeta_eval(0.5, &p).unwrap().re).abs() < 1e-9);
        assert!(z.im.abs() < 1e-9);
        let t = 0.5 * (1.0 + 1.0 / p.lambda);
        let z = contour_zeta(&p, t);
        assert!((z.re - 10.0).abs() < 1e-8, "{z}");
        assert!((z.im - height_on_slit(t, &p).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn tip_is_a_critical_point() {
        // ζ' vanishes at 1/λ, so the boundary turns back there
        let p = solve(1000.0f64, 1.0, 1.0, 1.0).unwrap();
        let t = 1.0 / p.lambda;
        let up = height_on_slit_quadrature(t * (1.0 - 1e-7), &p).unwrap();
        let tip = height_on_slit_quadrature(t, &p).unwrap();
        assert!(up < tip);
        let beyond = zeta_eval(t * (1.0 + 1e-7), &p).unwrap();
        assert!(beyond.im < tip);
    }

    #[test]
    fn slit_heights() {
        let p = params(100.0);
        assert!(height_on_slit(1.0, &p).unwrap().abs() < 1e-12);
        assert!((height_on_slit(1.0 / p.lambda, &p).unwrap() - 1.0).abs() < 1e-9);
        for i in 1..10 {
            let t = 1.0 + (1.0 / p.lambda - 1.0) * i as f64 / 10.0;
            let a = height_on_slit(t, &p).unwrap();
            let b = height_on_slit_quadrature(t, &p).unwrap();
            assert!((a - b).abs() < 1e-8, "t = {t}: {a} vs {b}");
            assert_eq!(height_on_slit_validated(t, &p).unwrap(), a);
        }
        assert!(height_on_slit(0.5, &p).is_err());
    }

    #[test]
    fn k_increases_and_residual_is_small() {
        let mut last = 0.0;
        for h in [10.0f64, 100.0, 1000.0] {
            let p = solve_k_for_h(h, 1.0, 1.0).unwrap();
            assert!(p.k > last);
            last = p.k;
            let r = parameter_ratio(p.modulus_pair());
            assert!((r / h - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn small_targets_report_the_bracket() {
        let e = solve_k_for_h(2.0f64, 1.0, 1.0).unwrap_err();
        assert!(matches!(e, Error::Bracket { .. }));
        let opts = SolveOptions { s_min: 0.01, ..SolveOptions::default() };
        let p = solve_k_for_h_with(2.0f64, 1.0, 1.0, opts).unwrap();
        assert!(p.k < 0.5);
    }

    #[test]
    fn mu_limits() {
        let p = solve_k_for_h(100.0f64, 1.0, 1.0).unwrap();
        let q = solve_mu_for_sigma(&p, 1.0).unwrap();
        assert_eq!(q.mu, p.lambda);
        let q = solve_mu_for_sigma(&p, 1e-6).unwrap();
        assert!(q.one_minus_mu < 1e-3 * p.one_minus_k);
        let q = solve_mu_for_sigma(&p, 0.5).unwrap();
        assert!(p.k < p.lambda && p.lambda < q.mu && q.mu < 1.0);
        assert!((height_on_slit_quadrature(1.0 / q.mu, &q).unwrap() - 0.5).abs() < 1e-8);
        assert!(solve_mu_for_sigma(&p, 1.5).is_err());
    }

    // Independent 30-digit evaluation (mpmath ellipk/ellipe/ellipf and
    // bisection on the same parameter system).
    #[test]
    fn frozen_high_precision_values() {
        let cases = [
            (10.0, 1.0, 1.0, 0.181_201_347_133_884_7, 1.411_305_878_103_859_5, 0.549_782_722_850_372_8, 0.549_782_722_850_372_8),
            (1e3, 1.0, 1.0, 0.001_998_001_249_500_140_6, 2.860_872_811_675_986_5, 0.500_499_999_781_250_1, 0.500_499_999_781_250_1),
            (100.0, 1.5, 0.5, 0.029_554_193_543_580_888, 1.787_460_210_363_666_7, 0.507_499_261_831_449_9, 0.029_440_682_238_388_586),
            (1e4, 1.5, 0.5, 0.000_299_955_004_218_496_9, 3.253_186_310_115_950_5, 0.500_074_999_999_261_7, 0.028_603_813_720_897_587),
        ];
        for (h, beta, sigma, q, m, r1, r2) in cases {
            let p = solve(h, 1.0f64, beta, sigma).unwrap();
            assert!((p.one_minus_k / q - 1.0).abs() < 1e-10, "H = {h}");
            assert!((mod_gstar3h(&p) / m - 1.0).abs() < 1e-10, "H = {h}");
            assert!((p.r1() / r1 - 1.0).abs() < 1e-8, "H = {h}");
            assert!((p.r2() / r2 - 1.0).abs() < 1e-8, "H = {h}");
        }
    }

    #[test]
    fn self_complementary_modulus_is_one() {
        let m = EllipticModulusPair::new(0.5f64.sqrt()).unwrap();
        assert!((modulus_from_kappa(m) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_proxy() {
        let mut p = params(10.0);
        p.one_minus_k = 1e-3;
        assert!((asym_lower(&p) - 1000f64.ln() / std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn ratios_converge_to_their_limits() {
        let (d1, d2) = delta_limits(1.0f64, 0.5);
        let hs = [1e2, 1e3, 1e4, 1e5];
        let r = delta_ratios(&hs, 1.0f64, 1.0, 0.5).unwrap();
        for w in r.windows(2) {
            assert!((w[1].0 - d1).abs() < (w[0].0 - d1).abs());
            assert!((w[1].1 - d2).abs() < (w[0].1 - d2).abs());
        }
        let last = r[r.len() - 1];
        assert!((last.0 - d1).abs() < 1e-3 && (last.1 - d2).abs() < 1e-3);
        assert!(r.iter().all(|&(a, b)| 0.0 < b && b < a && a < 1.0));
    }

    #[test]
    fn asymptotic_identities() {
        let p = solve(1e6f64, 1.0, 1.0, 0.5).unwrap();
        assert!((numerator_value(&p) - 1.0).abs() < 1e-4);
        assert!((denominator_ratio(&p).unwrap() - 1.0).abs() < 1e-4);
        assert!((kappa_gap_ratio(&p) - 1.0).abs() < 1e-4);
    }
}
