//! The separating polyline through boundary midpoints and the
//! piecewise-linear map that sends it to the real axis.

use num_complex::Complex;

use super::shape::{ShapedQuadrilateral, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Separation is checked at this many points inside every segment.
pub const OVERSAMPLING: usize = 16;
/// Breakpoint budget for adaptive refinement.
pub const MAX_BREAKPOINTS: usize = 1 << 14;

/// A polyline through `(x_j, y_j)`, `y_j = (f(x_j) + g(x_j)) / 2`, in the
/// unstretched coordinates. Segment `j` is `y = a_j x + b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Midcurve<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    slopes: Vec<T>,
    intercepts: Vec<T>,
}

impl<T: Real> Midcurve<T> {
    fn from_breakpoints(q: &ShapedQuadrilateral<T>, xs: Vec<T>) -> Self {
        let half = T::lit(0.5);
        let ys: Vec<T> = xs
            .iter()
            .map(|&x| {
                let (f, g) = q.eval(x);
                (f + g) * half
            })
            .collect();
        let mut slopes = Vec::with_capacity(xs.len() - 1);
        let mut intercepts = Vec::with_capacity(xs.len() - 1);
        for j in 0..xs.len() - 1 {
            let dx = xs[j + 1] - xs[j];
            slopes.push((ys[j + 1] - ys[j]) / dx);
            intercepts.push(-(xs[j] * ys[j + 1] - xs[j + 1] * ys[j]) / dx);
        }
        Midcurve { xs, ys, slopes, intercepts }
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.xs
    }

    pub fn heights(&self) -> &[T] {
        &self.ys
    }

    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[T] {
        &self.intercepts
    }

    pub fn segments(&self) -> usize {
        self.slopes.len()
    }

    /// `max_j |a_j|`.
    pub fn slope_bound(&self) -> T {
        self.slopes.iter().fold(T::zero(), |m, s| m.max(s.abs()))
    }

    /// Height of the polyline at `x`, continued by constants outside
    /// `[x_1, x_{n+1}]`.
    pub fn level(&self, x: T) -> T {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let j = self.segment_index(x);
        self.slopes[j] * x + self.intercepts[j]
    }

    fn segment_index(&self, x: T) -> usize {
        // largest j with xs[j] <= x, capped at the last segment
        let p = self.xs.partition_point(|&v| v <= x);
        p.saturating_sub(1).min(self.slopes.len() - 1)
    }

    /// Applies the stretch factor `h`.
    pub fn at_stretch(&self, h: T) -> Result<PolylineStraightening<T>> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("stretch factor H = {h} must be positive")));
        }
        let (kappa, big_k) = distortion(self.slope_bound(), h);
        Ok(PolylineStraightening { mid: self.clone(), h, kappa, big_k })
    }
}

fn distortion<T: Real>(slope_bound: T, h: T) -> (T, T) {
    let kappa = slope_bound / (slope_bound * slope_bound + T::lit(4.0) * h * h).sqrt();
    (kappa, (T::one() + kappa) / (T::one() - kappa))
}

/// Builds the separating polyline, starting from `n` uniform segments and
/// bisecting any segment that touches a boundary graph.
pub fn midcurve_polyline<T: Real>(q: &ShapedQuadrilateral<T>, n: usize) -> Result<Midcurve<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("polyline needs at least one segment".into()));
    }
    let (a, b) = (q.a(), q.b());
    let mut xs: Vec<T> = (0..=n).map(|i| a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(n)).collect();
    xs[n] = b;
    let dense: Vec<T> = q.samples(DEFAULT_SAMPLES).into_iter().map(|s| s.0).collect();
    loop {
        let mid = Midcurve::from_breakpoints(q, xs.clone());
        let bad = failing_segments(q, &mid, &dense);
        if bad.is_empty() {
            return Ok(mid);
        }
        if xs.len() + bad.len() > MAX_BREAKPOINTS {
            return Err(Error::Separation(format!(
                "{} segments still touch the boundary with {} breakpoints",
                bad.len(),
                xs.len()
            )));
        }
        let mut next = Vec::with_capacity(xs.len() + bad.len());
        let mut it = bad.iter().peekable();
        for j in 0..xs.len() - 1 {
            next.push(xs[j]);
            if it.peek() == Some(&&j) {
                it.next();
                let m = (xs[j] + xs[j + 1]) * T::lit(0.5);
                if !(m > xs[j] && m < xs[j + 1]) {
                    return Err(Error::Separation("segment too short to bisect".into()));
                }
                next.push(m);
            }
        }
        next.push(xs[xs.len() - 1]);
        xs = next;
    }
}

fn separated<T: Real>(q: &ShapedQuadrilateral<T>, mid: &Midcurve<T>, x: T) -> bool {
    let (f, g) = q.eval(x);
    let y = mid.level(x);
    f < y && y < g
}

fn failing_segments<T: Real>(q: &ShapedQuadrilateral<T>, mid: &Midcurve<T>, dense: &[T]) -> Vec<usize> {
    let mut bad = vec![false; mid.segments()];
    for j in 0..mid.segments() {
        let (x0, x1) = (mid.xs[j], mid.xs[j + 1]);
        for i in 0..=OVERSAMPLING {
            let x = x0 + (x1 - x0) * T::from_usize_lossy(i) / T::from_usize_lossy(OVERSAMPLING);
            if !separated(q, mid, x) {
                bad[j] = true;
                break;
            }
        }
    }
    for &x in dense {
        if !separated(q, mid, x) {
            bad[mid.segment_index(x)] = true;
        }
    }
    bad.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect()
}

/// The map `x + iy ↦ x + i v(x, y)` that subtracts the stretched polyline
/// height, together with its distortion.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylineStraightening<T> {
    mid: Midcurve<T>,
    h: T,
    kappa: T,
    big_k: T,
}

impl<T: Real> PolylineStraightening<T> {
    pub fn midcurve(&self) -> &Midcurve<T> {
        &self.mid
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// `(κ_H, K_H)`.
    pub fn qc_coefficient(&self) -> (T, T) {
        (self.kappa, self.big_k)
    }

    /// Height of the stretched polyline at stretched abscissa `x`.
    pub fn level(&self, x: T) -> T {
        let n = self.mid.xs.len();
        if x <= self.mid.xs[0] * self.h {
            return self.mid.ys[0];
        }
        if x >= self.mid.xs[n - 1] * self.h {
            return self.mid.ys[n - 1];
        }
        let j = self.mid.segment_index(x / self.h);
        self.mid.slopes[j] / self.h * x + self.mid.intercepts[j]
    }

    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        Complex::new(z.re, z.im - self.level(z.re))
    }

    pub fn invert(&self, w: Complex<T>) -> Complex<T> {
        Complex::new(w.re, w.im + self.level(w.re))
    }

    /// Midpoints `I_H`, `J_H` of the stretched end segments.
    pub fn end_midpoints(&self) -> (Complex<T>, Complex<T>) {
        let n = self.mid.xs.len();
        (
            Complex::new(self.mid.xs[0] * self.h, self.mid.ys[0]),
            Complex::new(self.mid.xs[n - 1] * self.h, self.mid.ys[n - 1]),
        )
    }
}

/// `(κ_H, K_H)` with `κ_H = 𝔞 / sqrt(𝔞² + 4H²)`.
pub fn qc_coefficient<T: Real>(p: &PolylineStraightening<T>) -> (T, T) {
    p.qc_coefficient()
}

/// Applies the straightening map to `z`.
pub fn straightening_apply<T: Real>(p: &PolylineStraightening<T>, z: Complex<T>) -> Complex<T> {
    p.apply(z)
}

/// The base shape with the polyline subtracted: stretching it by `H` gives
/// the straightened quadrilateral `Q_1H` for every `H`.
pub fn straighten_shape<T: Real>(q: &ShapedQuadrilateral<T>, mid: &Midcurve<T>) -> ShapedQuadrilateral<T> {
    ShapedQuadrilateral::straightened(q, mid.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shape::Preset;

    #[test]
    fn strip_midline_is_flat() {
        let q = ShapedQuadrilateral::from_preset(Preset::Strip, -1.0f64, 1.0).unwrap();
        let m = midcurve_polyline(&q, 1).unwrap();
        assert_eq!(m.segments(), 1);
        assert_eq!(m.slope_bound(), 0.0);
        assert_eq!(m.level(0.3), 0.0);
        let p = m.at_stretch(10.0).unwrap();
        assert_eq!(p.qc_coefficient(), (0.0, 1.0));
    }

    #[test]
    fn linear_boundaries_give_linear_midline() {
        let q = ShapedQuadrilateral::from_preset(Preset::trapezoid(), 0.0f64, 1.0).unwrap();
        let m = midcurve_polyline(&q, 1).unwrap();
        assert_eq!(m.segments(), 1);
        assert!((m.slopes()[0] - 0.5).abs() < 1e-15);
        assert!(m.intercepts()[0].abs() < 1e-15);
    }

    #[test]
    fn distortion_examples() {
        let (k, big) = distortion(2.0f64, 1.0);
        assert!((k - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((big - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        let mut last = f64::INFINITY;
        for h in [1.0, 10.0, 100.0, 1e4] {
            let (_, big) = distortion(2.0f64, h);
            assert!(big < last && big >= 1.0);
            last = big;
        }
        assert!(last - 1.0 < 1e-3);
    }

    #[test]
    fn sinusoid_is_separated_densely() {
        let q = ShapedQuadrilateral::from_preset(Preset::Sinusoidal { amplitude: 0.9, frequency: 3.0, phase: 1.0 }, -1.0f64, 1.0)
            .unwrap();
        let m = midcurve_polyline(&q, 1).unwrap();
        assert!(m.segments() > 1);
        for i in 0..1000 {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / 1000.0;
            assert!(separated(&q, &m, x), "x = {x}");
        }
    }

    #[test]
    fn straightening_is_continuous_and_maps_polyline_to_axis() {
        let q = ShapedQuadrilateral::from_preset(Preset::sinusoidal(), -1.0f64, 1.0).unwrap();
        let m = midcurve_polyline(&q, 4).unwrap();
        let h = 50.0;
        let p = m.at_stretch(h).unwrap();
        for (&x, &y) in m.breakpoints().iter().zip(m.heights()) {
            let z = Complex::new(x * h, y);
            assert!(p.apply(z).im.abs() < 1e-14);
        }
        // neighbouring segment formulas agree at interior breakpoints
        for j in 1..m.segments() {
            let x = m.breakpoints()[j];
            let left = m.slopes()[j - 1] * x + m.intercepts()[j - 1];
            let right = m.slopes()[j] * x + m.intercepts()[j];
            assert!((left - right).abs() < 1e-14);
        }
        let z = Complex::new(-1000.0, 3.0);
        assert_eq!(p.apply(z), Complex::new(-1000.0, 3.0 - m.heights()[0]));
        let (i_h, j_h) = p.end_midpoints();
        assert!(p.apply(i_h).im.abs() < 1e-15 && p.apply(j_h).im.abs() < 1e-15);
    }

    #[test]
    fn straightened_shape_is_symmetric_at_ends() {
        let q = ShapedQuadrilateral::from_preset(Preset::sinusoidal(), -1.0f64, 1.0).unwrap();
        let m = midcurve_polyline(&q, 8).unwrap();
        let s = straighten_shape(&q, &m);
        for x in [-1.0, 1.0] {
            let (f, g) = s.eval(x);
            assert!((f + g).abs() < 1e-15);
        }
        for i in 0..1000 {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / 1000.0;
            let (f, g) = s.eval(x);
            assert!(f < 0.0 && 0.0 < g);
        }
    }
}
