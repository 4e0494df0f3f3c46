//! Comparison configurations bounding the exterior modulus of a straightened
//! quadrilateral.
//!
//! Conventions: the straightened quadrilateral occupies `|x| <= αH`; its end
//! segments have half-heights `β` at `x = +αH` and `σ <= β` at `x = -αH`
//! (shapes with the longer end on the left are mirrored first). Marked
//! points are listed in positive order for the exterior domain, so the
//! Neumann edges are `(w1, w2)` and `(w3, w4)`, the potential vanishes on
//! `(w2, w3)` (below) and equals one on `(w4, w1)` (above).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::shape::ShapedQuadrilateral;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfigKind {
    /// Exterior of the rectangle `[-αH, αH] × [-M, M]`, marks at the end heights.
    G2H,
    /// Exterior of two vertical slits and the horizontal segment joining them.
    G3H,
    /// `G2H` with the marks at `+αH` projected to height `±σ`.
    Gtilde2H,
    /// `G3H` with the marks at `+αH` projected to `±σ` on the inner side.
    Gtilde3H,
    /// Like `Gtilde3H` but with the left slit extended to half-height `β`.
    Gstar3H,
}

impl ConfigKind {
    pub const ALL: [ConfigKind; 5] =
        [ConfigKind::G2H, ConfigKind::G3H, ConfigKind::Gtilde2H, ConfigKind::Gtilde3H, ConfigKind::Gstar3H];

    fn projected(self) -> bool {
        matches!(self, ConfigKind::Gtilde2H | ConfigKind::Gtilde3H | ConfigKind::Gstar3H)
    }

    fn has_rectangle(self) -> bool {
        matches!(self, ConfigKind::G2H | ConfigKind::Gtilde2H)
    }
}

/// Side of a vertical slit a marked point sits on. `Inner` faces the other
/// slit, `Outer` faces away from it. Tips carry no side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlitSide {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedPoint<T> {
    pub z: Complex<T>,
    pub side: Option<SlitSide>,
}

impl<T: Real> MarkedPoint<T> {
    fn at(x: T, y: T) -> Self {
        MarkedPoint { z: Complex::new(x, y), side: None }
    }

    fn inner(x: T, y: T) -> Self {
        MarkedPoint { z: Complex::new(x, y), side: Some(SlitSide::Inner) }
    }
}

/// A fully marked comparison configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedSlitConfiguration<T> {
    pub kind: ConfigKind,
    pub alpha: T,
    pub beta: T,
    pub sigma: T,
    pub h: T,
    /// Rectangle half-height, for the rectangle kinds.
    pub m: Option<T>,
    pub marks: [MarkedPoint<T>; 4],
}

impl<T: Real> MarkedSlitConfiguration<T> {
    /// Half-width `αH`.
    pub fn half_width(&self) -> T {
        self.alpha * self.h
    }

    /// Half-heights of the (right, left) vertical slits for the slit kinds.
    pub fn slit_half_heights(&self) -> Option<(T, T)> {
        match self.kind {
            ConfigKind::G3H | ConfigKind::Gtilde3H => Some((self.beta, self.sigma)),
            ConfigKind::Gstar3H => Some((self.beta, self.beta)),
            _ => None,
        }
    }
}

/// Builds one of the comparison configurations.
pub fn build_configuration<T: Real>(
    kind: ConfigKind,
    alpha: T,
    beta: T,
    sigma: T,
    m: Option<T>,
    h: T,
) -> Result<MarkedSlitConfiguration<T>> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("sigma", sigma), ("H", h)] {
        if !(v > T::zero() && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
        }
    }
    if kind.projected() && sigma > beta {
        return Err(Error::InvalidParameter(format!("sigma = {sigma} exceeds beta = {beta}; mirror the shape first")));
    }
    let m = if kind.has_rectangle() {
        let m = m.unwrap_or_else(|| default_rectangle_height(beta.max(sigma)));
        if !(m > beta.max(sigma)) {
            return Err(Error::InvalidParameter(format!("rectangle half-height M = {m} must exceed {}", beta.max(sigma))));
        }
        Some(m)
    } else {
        None
    };
    let x = alpha * h;
    let marks = match kind {
        ConfigKind::G2H | ConfigKind::G3H => {
            [MarkedPoint::at(x, beta), MarkedPoint::at(x, -beta), MarkedPoint::at(-x, -sigma), MarkedPoint::at(-x, sigma)]
        }
        ConfigKind::Gtilde2H => {
            [MarkedPoint::at(x, sigma), MarkedPoint::at(x, -sigma), MarkedPoint::at(-x, -sigma), MarkedPoint::at(-x, sigma)]
        }
        ConfigKind::Gtilde3H => [
            MarkedPoint::inner(x, sigma),
            MarkedPoint::inner(x, -sigma),
            MarkedPoint::at(-x, -sigma),
            MarkedPoint::at(-x, sigma),
        ],
        ConfigKind::Gstar3H => [
            MarkedPoint::inner(x, sigma),
            MarkedPoint::inner(x, -sigma),
            MarkedPoint::inner(-x, -sigma),
            MarkedPoint::inner(-x, sigma),
        ],
    };
    Ok(MarkedSlitConfiguration { kind, alpha, beta, sigma, h, m, marks })
}

/// `1.25 * max(|f|, |g|) + 0.5`.
pub fn default_rectangle_height<T: Real>(max_abs_height: T) -> T {
    T::lit(1.25) * max_abs_height + T::lit(0.5)
}

/// End parameters of a straightened, centred shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndParameters<T> {
    pub alpha: T,
    pub beta: T,
    pub sigma: T,
    /// Whether the shape had to be mirrored to put the longer end at `+α`.
    pub mirrored: bool,
}

/// Reads `α`, `β = g_1(α)`, `σ = g_1(-α)` from a straightened shape,
/// mirroring when the left end is the longer one. Returns the (possibly
/// mirrored) centred shape along with the parameters.
pub fn end_parameters<T: Real>(q1: &ShapedQuadrilateral<T>) -> (ShapedQuadrilateral<T>, EndParameters<T>) {
    let c = q1.centered();
    let half = T::lit(0.5);
    let (fr, gr) = c.eval(c.b());
    let (fl, gl) = c.eval(c.a());
    let right = (gr - fr) * half;
    let left = (gl - fl) * half;
    let alpha = c.b();
    if left > right {
        (c.mirrored(), EndParameters { alpha, beta: left, sigma: right, mirrored: true })
    } else {
        (c, EndParameters { alpha, beta: right, sigma: left, mirrored: false })
    }
}

/// `M` for a straightened shape: `1.25 max |f_1|, |g_1| + 0.5`.
pub fn rectangle_height_for<T: Real>(q1: &ShapedQuadrilateral<T>) -> T {
    let (lo, hi) = q1.height_range(super::shape::DEFAULT_SAMPLES);
    default_rectangle_height(lo.abs().max(hi.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shape::Preset;
    use crate::geometry::straighten::{midcurve_polyline, straighten_shape};

    #[test]
    fn rectangle_configuration() {
        let c = build_configuration(ConfigKind::G2H, 1.0f64, 1.0, 1.0, Some(2.0), 10.0).unwrap();
        assert_eq!(c.half_width(), 10.0);
        assert_eq!(c.m, Some(2.0));
        assert_eq!(c.marks[0].z, Complex::new(10.0, 1.0));
        assert!(build_configuration(ConfigKind::G2H, 1.0f64, 1.0, 1.0, Some(1.0), 10.0).is_err());
    }

    #[test]
    fn projected_kinds_need_sigma_below_beta() {
        assert!(build_configuration(ConfigKind::Gstar3H, 1.0f64, 1.0, 2.0, None, 10.0).is_err());
        assert!(build_configuration(ConfigKind::G3H, 1.0f64, 1.0, 2.0, None, 10.0).is_ok());
    }

    #[test]
    fn degenerate_projection_hits_tips() {
        let c = build_configuration(ConfigKind::Gstar3H, 1.0f64, 0.7, 0.7, None, 10.0).unwrap();
        assert_eq!(c.marks[0].z, Complex::new(10.0, 0.7));
        assert_eq!(c.marks[3].z, Complex::new(-10.0, 0.7));
        assert_eq!(c.slit_half_heights(), Some((0.7, 0.7)));
    }

    #[test]
    fn trapezoid_end_parameters() {
        let q = ShapedQuadrilateral::from_preset(Preset::trapezoid(), -1.0f64, 1.0).unwrap();
        let mid = midcurve_polyline(&q, 1).unwrap();
        let (_, p) = end_parameters(&straighten_shape(&q, &mid));
        assert_eq!((p.alpha, p.beta, p.sigma, p.mirrored), (1.0, 1.5, 0.5, false));
        let (m, p) = end_parameters(&straighten_shape(&q.mirrored(), &midcurve_polyline(&q.mirrored(), 1).unwrap()));
        assert!(p.mirrored);
        assert_eq!((p.beta, p.sigma), (1.5, 0.5));
        assert!((m.upper(1.0) - 1.5).abs() < 1e-15);
    }
}
