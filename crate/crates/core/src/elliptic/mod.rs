//! Complete and incomplete elliptic integrals of the first and second kind.
//!
//! Reference values come from the arithmetic–geometric mean (complete
//! integrals) and Carlson's symmetric forms (incomplete integrals). The
//! binomial series in [`series`] are kept as independent cross-checks and
//! for the near-degenerate regimes.
//!
//! Moduli near 1 lose precision when stored as `k` alone, so every routine
//! works from an [`EllipticModulusPair`] that carries `k` and
//! `k' = sqrt(1 - k^2)` independently.

mod carlson;
pub mod oracle;
pub mod series;

pub use carlson::{rd, rf};
pub use oracle::{quadrature_e, quadrature_f};
pub use series::{
    complete_e_large_series, complete_e_small_series, complete_k_large_series, complete_k_small_series, i2n,
    i2n_table, series_e, series_f, SeriesTruncation,
};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Moduli below this (or complements below this) are clamped.
pub const DEGENERATE_MODULUS: f64 = 1e-12;

/// A modulus `k` together with its complement `k'`, both in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulusPair<T> {
    k: T,
    k_prime: T,
    clamped: bool,
}

impl<T: Real> EllipticModulusPair<T> {
    /// Builds the pair from `k`. Values below [`DEGENERATE_MODULUS`] are
    /// clamped and flagged.
    pub fn new(k: T) -> Result<Self> {
        if !(k > T::zero() && k < T::one()) {
            return Err(Error::domain("elliptic modulus", format!("k = {k} not in (0, 1)")));
        }
        let floor = T::lit(DEGENERATE_MODULUS);
        if k < floor {
            log::debug!("elliptic modulus k = {k} clamped to {floor}");
            return Ok(Self::clamped(floor, (T::one() - floor * floor).sqrt()));
        }
        let k_prime = ((T::one() - k) * (T::one() + k)).sqrt();
        if k_prime < floor {
            log::debug!("complementary modulus {k_prime} clamped to {floor}");
            return Ok(Self::clamped((T::one() - floor * floor).sqrt(), floor));
        }
        Ok(EllipticModulusPair { k, k_prime, clamped: false })
    }

    /// Builds the pair from the complementary modulus `k'`.
    pub fn from_complement(k_prime: T) -> Result<Self> {
        Ok(Self::new(k_prime)?.complement())
    }

    /// Builds the pair from `q = 1 - k`, keeping `k'` accurate when `q` is
    /// tiny.
    pub fn from_one_minus_k(q: T) -> Result<Self> {
        if !(q > T::zero() && q < T::one()) {
            return Err(Error::domain("elliptic modulus", format!("1 - k = {q} not in (0, 1)")));
        }
        let k_prime = (q * (T::lit(2.0) - q)).sqrt();
        if k_prime < T::lit(DEGENERATE_MODULUS) {
            return Self::from_complement(k_prime);
        }
        let k = T::one() - q;
        if k < T::lit(DEGENERATE_MODULUS) {
            return Self::new(k);
        }
        Ok(EllipticModulusPair { k, k_prime, clamped: false })
    }

    fn clamped(k: T, k_prime: T) -> Self {
        EllipticModulusPair { k, k_prime, clamped: true }
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn k_prime(&self) -> T {
        self.k_prime
    }

    /// Whether the input was moved onto the degenerate-modulus floor.
    pub fn was_clamped(&self) -> bool {
        self.clamped
    }

    /// The pair `(k', k)`.
    pub fn complement(&self) -> Self {
        EllipticModulusPair { k: self.k_prime, k_prime: self.k, clamped: self.clamped }
    }

    /// `1 - k` without cancellation.
    pub fn one_minus_k(&self) -> T {
        self.k_prime * self.k_prime / (T::one() + self.k)
    }

    pub fn complete_k(&self) -> T {
        agm(*self).k
    }

    pub fn complete_e(&self) -> T {
        let r = agm(*self);
        r.k - r.k_minus_e
    }

    /// `K(k) - E(k)`, computed without subtracting the two integrals.
    pub fn complete_k_minus_e(&self) -> T {
        agm(*self).k_minus_e
    }

    pub fn complete_k_prime(&self) -> T {
        self.complement().complete_k()
    }

    pub fn complete_e_prime(&self) -> T {
        self.complement().complete_e()
    }
}

struct AgmResult<T> {
    k: T,
    k_minus_e: T,
}

// K = pi / (2 M(1, k')), E = K (1 - sum 2^{n-1} c_n^2) with c_0 = k.
fn agm<T: Real>(pair: EllipticModulusPair<T>) -> AgmResult<T> {
    let half = T::lit(0.5);
    let mut a = T::one();
    let mut b = pair.k_prime;
    let mut c = pair.k;
    let mut weight = half;
    let mut sum = weight * c * c;
    for _ in 0..64 {
        if c.abs() <= T::epsilon() * a {
            break;
        }
        let a_next = (a + b) * half;
        c = (a - b) * half;
        b = (a * b).sqrt();
        a = a_next;
        weight = weight * T::lit(2.0);
        sum = sum + weight * c * c;
    }
    let k = T::FRAC_PI_2() / a;
    AgmResult { k, k_minus_e: k * sum }
}

/// Complete elliptic integral of the first kind, `K(k)`.
pub fn complete_k<T: Real>(k: T) -> Result<T> {
    Ok(EllipticModulusPair::new(k)?.complete_k())
}

/// Complete elliptic integral of the second kind, `E(k)`.
pub fn complete_e<T: Real>(k: T) -> Result<T> {
    Ok(EllipticModulusPair::new(k)?.complete_e())
}

/// `K'(k) = K(k')`.
pub fn complete_k_prime<T: Real>(k: T) -> Result<T> {
    Ok(EllipticModulusPair::new(k)?.complete_k_prime())
}

/// `E'(k) = E(k')`.
pub fn complete_e_prime<T: Real>(k: T) -> Result<T> {
    Ok(EllipticModulusPair::new(k)?.complete_e_prime())
}

fn check_amplitude<T: Real>(op: &'static str, x: T) -> Result<()> {
    if x >= T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("x = {x} not in [0, 1]")))
    }
}

/// `F(x, k) = ∫_0^x dt / sqrt((1 - t^2)(1 - k^2 t^2))`.
pub fn incomplete_f<T: Real>(x: T, k: T) -> Result<T> {
    check_amplitude("incomplete_f", x)?;
    Ok(incomplete_f_pair(x, EllipticModulusPair::new(k)?))
}

/// `E(x, k) = ∫_0^x sqrt((1 - k^2 t^2) / (1 - t^2)) dt`.
pub fn incomplete_e<T: Real>(x: T, k: T) -> Result<T> {
    check_amplitude("incomplete_e", x)?;
    Ok(incomplete_e_pair(x, EllipticModulusPair::new(k)?))
}

pub fn incomplete_f_pair<T: Real>(x: T, m: EllipticModulusPair<T>) -> T {
    if x == T::zero() {
        return T::zero();
    }
    let (c, d) = carlson_args(x, m);
    x * rf(c, d, T::one())
}

pub fn incomplete_e_pair<T: Real>(x: T, m: EllipticModulusPair<T>) -> T {
    incomplete_f_pair(x, m) - incomplete_f_minus_e_pair(x, m)
}

/// `F(x, k) - E(x, k) = (k^2 x^3 / 3) R_D(1 - x^2, 1 - k^2 x^2, 1)`,
/// free of cancellation for small `k`.
pub fn incomplete_f_minus_e_pair<T: Real>(x: T, m: EllipticModulusPair<T>) -> T {
    if x == T::zero() {
        return T::zero();
    }
    let (c, d) = carlson_args(x, m);
    m.k * m.k * x * x * x / T::lit(3.0) * rd(c, d, T::one())
}

// 1 - x^2 and 1 - k^2 x^2, the latter written as k'^2 + k^2 (1 - x^2) so
// that it stays accurate for k close to 1.
fn carlson_args<T: Real>(x: T, m: EllipticModulusPair<T>) -> (T, T) {
    let c = ((T::one() - x) * (T::one() + x)).max(T::zero());
    let d = m.k_prime * m.k_prime + m.k * m.k * c;
    (c, d)
}
