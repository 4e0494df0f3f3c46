//! Quadrilaterals of the class bounded by two vertical end segments and the
//! graphs of `f < g` over `[a, b]`, and their horizontal stretches.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::straighten::Midcurve;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::Real;

/// Number of dense samples used to validate and export a shape.
pub const DEFAULT_SAMPLES: usize = 4096;

/// Analytic boundary presets. Parameters are plain `f64` so presets can be
/// shared between precisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Preset {
    /// `f = -1`, `g = 1`.
    Strip,
    /// `f = -1`, `g = 1 + slope * x`.
    Trapezoid { slope: f64 },
    /// `f = -1 + A sin(ω π x)`, `g = 1 + A sin(ω π x + φ)`.
    Sinusoidal { amplitude: f64, frequency: f64, phase: f64 },
}

impl Preset {
    pub fn trapezoid() -> Self {
        Preset::Trapezoid { slope: 1.0 }
    }

    pub fn sinusoidal() -> Self {
        Preset::Sinusoidal { amplitude: 0.3, frequency: 1.5, phase: 0.5 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Strip => "strip",
            Preset::Trapezoid { .. } => "trapezoid",
            Preset::Sinusoidal { .. } => "sinusoidal",
        }
    }

    fn eval<T: Real>(&self, x: T) -> (T, T) {
        let one = T::one();
        match *self {
            Preset::Strip => (-one, one),
            Preset::Trapezoid { slope } => (-one, one + T::lit(slope) * x),
            Preset::Sinusoidal { amplitude, frequency, phase } => {
                let arg = T::lit(frequency) * T::PI() * x;
                let amp = T::lit(amplitude);
                (-one + amp * arg.sin(), one + amp * (arg + T::lit(phase)).sin())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Source<T> {
    Preset(Preset),
    /// Piecewise-linear interpolation of a sample table.
    Table { xs: Vec<T>, f: Vec<T>, g: Vec<T> },
    /// The base shape with a polyline subtracted from both boundaries.
    Straightened { base: Box<ShapedQuadrilateral<T>>, mid: Midcurve<T> },
}

/// A quadrilateral `{a <= x <= b, f(x) <= y <= g(x)}` with vertices
/// `A = a + i f(a)`, `B = b + i f(b)`, `C = b + i g(b)`, `D = a + i g(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapedQuadrilateral<T> {
    a: T,
    b: T,
    // source abscissa = (±x) + offset
    offset: T,
    mirror: bool,
    source: Source<T>,
}

impl<T: Real> ShapedQuadrilateral<T> {
    /// A preset on `[a, b]`.
    pub fn from_preset(preset: Preset, a: T, b: T) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidShape(format!("need a < b, got [{a}, {b}]")));
        }
        let q = ShapedQuadrilateral { a, b, offset: T::zero(), mirror: false, source: Source::Preset(preset) };
        q.validate(None)?;
        Ok(q)
    }

    /// A sampled shape; `xs` must be strictly increasing. Adjacent samples of
    /// `f` and `g` may differ by at most `max_jump` (a crude modulus of
    /// continuity check).
    pub fn from_samples(xs: Vec<T>, f: Vec<T>, g: Vec<T>, max_jump: T) -> Result<Self> {
        if xs.len() < 2 || xs.len() != f.len() || xs.len() != g.len() {
            return Err(Error::InvalidShape(format!(
                "sample table needs >= 2 rows of equal length (x: {}, f: {}, g: {})",
                xs.len(),
                f.len(),
                g.len()
            )));
        }
        if xs.iter().chain(&f).chain(&g).any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape("non-finite sample".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidShape("sample abscissae must be strictly increasing".into()));
        }
        for (i, w) in f.windows(2).zip(g.windows(2)).enumerate() {
            let jump = (w.0[1] - w.0[0]).abs().max((w.1[1] - w.1[0]).abs());
            if jump > max_jump {
                return Err(Error::InvalidShape(format!(
                    "boundary jumps by {jump} between samples {i} and {} (limit {max_jump})",
                    i + 1
                )));
            }
        }
        let (a, b) = (xs[0], xs[xs.len() - 1]);
        let q = ShapedQuadrilateral { a, b, offset: T::zero(), mirror: false, source: Source::Table { xs, f, g } };
        q.validate(None)?;
        Ok(q)
    }

    pub(crate) fn straightened(base: &ShapedQuadrilateral<T>, mid: Midcurve<T>) -> Self {
        ShapedQuadrilateral {
            a: base.a,
            b: base.b,
            offset: T::zero(),
            mirror: false,
            source: Source::Straightened { base: Box::new(base.clone()), mid },
        }
    }

    fn validate(&self, samples: Option<usize>) -> Result<()> {
        let n = samples.unwrap_or(DEFAULT_SAMPLES);
        for i in 0..n {
            let x = self.sample_x(i, n);
            let (f, g) = self.eval(x);
            if !(f.is_finite() && g.is_finite()) {
                return Err(Error::InvalidShape(format!("boundary not finite at x = {x}")));
            }
            if !(f < g) {
                return Err(Error::InvalidShape(format!("f = {f} is not below g = {g} at x = {x}")));
            }
        }
        Ok(())
    }

    fn sample_x(&self, i: usize, n: usize) -> T {
        if i + 1 == n {
            self.b
        } else {
            self.a + (self.b - self.a) * T::from_usize_lossy(i) / T::from_usize_lossy(n - 1)
        }
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn preset(&self) -> Option<Preset> {
        match self.source {
            Source::Preset(p) => Some(p),
            _ => None,
        }
    }

    fn source_x(&self, x: T) -> T {
        (if self.mirror { -x } else { x }) + self.offset
    }

    /// `(f(x), g(x))`. Arguments outside `[a, b]` are clamped.
    pub fn eval(&self, x: T) -> (T, T) {
        let x = x.max(self.a).min(self.b);
        let s = self.source_x(x);
        match &self.source {
            Source::Preset(p) => p.eval(s),
            Source::Table { xs, f, g } => {
                let j = match xs.binary_search_by(|v| v.partial_cmp(&s).unwrap_or(std::cmp::Ordering::Less)) {
                    Ok(j) => return (f[j], g[j]),
                    Err(j) => j.clamp(1, xs.len() - 1),
                };
                let t = (s - xs[j - 1]) / (xs[j] - xs[j - 1]);
                (f[j - 1] + t * (f[j] - f[j - 1]), g[j - 1] + t * (g[j] - g[j - 1]))
            }
            Source::Straightened { base, mid } => {
                let (f, g) = base.eval(s);
                let y = mid.level(s);
                (f - y, g - y)
            }
        }
    }

    pub fn lower(&self, x: T) -> T {
        self.eval(x).0
    }

    pub fn upper(&self, x: T) -> T {
        self.eval(x).1
    }

    /// Vertices `[A, B, C, D]`.
    pub fn vertices(&self) -> [Complex<T>; 4] {
        let (fa, ga) = self.eval(self.a);
        let (fb, gb) = self.eval(self.b);
        [Complex::new(self.a, fa), Complex::new(self.b, fb), Complex::new(self.b, gb), Complex::new(self.a, ga)]
    }

    /// Copy translated so that `b = -a`.
    pub fn centered(&self) -> Self {
        let c = (self.a + self.b) * T::lit(0.5);
        let mut q = self.clone();
        q.a = self.a - c;
        q.b = self.b - c;
        q.offset = if self.mirror { self.offset - c } else { self.offset + c };
        q
    }

    /// Reflection `x ↦ -x`.
    pub fn mirrored(&self) -> Self {
        let mut q = self.clone();
        q.a = -self.b;
        q.b = -self.a;
        q.mirror = !self.mirror;
        q
    }

    /// `n` uniform samples `(x, f(x), g(x))` including both endpoints.
    pub fn samples(&self, n: usize) -> Vec<(T, T, T)> {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let x = self.sample_x(i, n);
                let (f, g) = self.eval(x);
                (x, f, g)
            })
            .collect()
    }

    /// Abscissae where the boundary may have kinks (table nodes, polyline
    /// breakpoints), in this shape's coordinates.
    pub fn kinks(&self) -> Vec<T> {
        let raw: Vec<T> = match &self.source {
            Source::Preset(_) => Vec::new(),
            Source::Table { xs, .. } => xs.clone(),
            Source::Straightened { base, mid } => {
                let mut v = base.kinks();
                v.extend(mid.breakpoints().iter().copied());
                v
            }
        };
        let mut out: Vec<T> = raw
            .into_iter()
            .map(|s| if self.mirror { -(s - self.offset) } else { s - self.offset })
            .filter(|&x| x > self.a && x < self.b)
            .collect();
        out.sort_by(|p, q| p.partial_cmp(q).unwrap_or(std::cmp::Ordering::Equal));
        out.dedup();
        out
    }

    /// `c = ∫_a^b dx / (g - f)`, the constant in the interior law
    /// `Mod(Q_H) ~ c H`.
    pub fn interior_constant(&self) -> Result<T> {
        let mut knots = vec![self.a];
        knots.extend(self.kinks());
        knots.push(self.b);
        let mut total = T::zero();
        for w in knots.windows(2) {
            let r = integrate(
                |x| {
                    let (f, g) = self.eval(x);
                    T::one() / (g - f)
                },
                w[0],
                w[1],
                QuadOptions::default(),
            )?;
            total = total + r.value;
        }
        Ok(total)
    }

    /// Smallest and largest boundary height over `n` samples.
    pub fn height_range(&self, n: usize) -> (T, T) {
        self.samples(n).iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &(_, f, g)| (lo.min(f), hi.max(g)))
    }
}

/// The image of a shaped quadrilateral under `x + iy ↦ Hx + iy`.
#[derive(Debug, Clone, PartialEq)]
pub struct StretchedQuadrilateral<T> {
    base: ShapedQuadrilateral<T>,
    h: T,
}

/// Applies the stretching map with factor `h > 1`.
pub fn stretch<T: Real>(q: &ShapedQuadrilateral<T>, h: T) -> Result<StretchedQuadrilateral<T>> {
    if !(h > T::one()) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("stretch factor H = {h} must exceed 1")));
    }
    Ok(StretchedQuadrilateral { base: q.clone(), h })
}

impl<T: Real> StretchedQuadrilateral<T> {
    pub fn base(&self) -> &ShapedQuadrilateral<T> {
        &self.base
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// `(f(x/H), g(x/H))`.
    pub fn eval(&self, x: T) -> (T, T) {
        self.base.eval(x / self.h)
    }

    /// Stretched vertices `[A_H, B_H, C_H, D_H]`.
    pub fn vertices(&self) -> [Complex<T>; 4] {
        self.base.vertices().map(|z| Complex::new(z.re * self.h, z.im))
    }

    /// Whether `z` lies in the closed stretched domain.
    pub fn contains(&self, z: Complex<T>) -> bool {
        let (a, b) = (self.base.a * self.h, self.base.b * self.h);
        if z.re < a || z.re > b {
            return false;
        }
        let (f, g) = self.eval(z.re);
        f <= z.im && z.im <= g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_vertices_and_stretch() {
        let q = ShapedQuadrilateral::from_preset(Preset::Strip, -1.0f64, 1.0).unwrap();
        let s = stretch(&q, 10.0).unwrap();
        let v = s.vertices();
        assert_eq!(v[0], Complex::new(-10.0, -1.0));
        assert_eq!(v[2], Complex::new(10.0, 1.0));
        assert!(s.contains(Complex::new(9.9, 0.99)));
        assert!(!s.contains(Complex::new(10.1, 0.0)));
        assert!(stretch(&q, 1.0).is_err());
    }

    #[test]
    fn interior_constants() {
        let strip = ShapedQuadrilateral::from_preset(Preset::Strip, -1.0f64, 1.0).unwrap();
        assert!((strip.interior_constant().unwrap() - 1.0).abs() < 1e-13);
        let trap = ShapedQuadrilateral::from_preset(Preset::trapezoid(), -1.0f64, 1.0).unwrap();
        assert!((trap.interior_constant().unwrap() - 3f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn rejects_crossing_boundaries() {
        let bad = Preset::Trapezoid { slope: 3.0 };
        assert!(matches!(ShapedQuadrilateral::from_preset(bad, -1.0f64, 1.0), Err(Error::InvalidShape(_))));
        let xs = vec![0.0, 0.5, 1.0];
        assert!(ShapedQuadrilateral::from_samples(xs.clone(), vec![0.0; 3], vec![1.0, -0.1, 1.0], 10.0).is_err());
        assert!(ShapedQuadrilateral::from_samples(xs.clone(), vec![0.0; 3], vec![1.0, 9.0, 1.0], 2.0).is_err());
        assert!(ShapedQuadrilateral::from_samples(vec![0.0, 0.0], vec![0.0; 2], vec![1.0; 2], 1.0).is_err());
    }

    #[test]
    fn table_interpolation() {
        let q = ShapedQuadrilateral::from_samples(vec![0.0f64, 1.0, 3.0], vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 1.0], 5.0)
            .unwrap();
        assert_eq!(q.eval(0.5), (0.0, 1.5));
        assert_eq!(q.eval(2.0), (0.0, 1.5));
        assert_eq!(q.eval(1.0), (0.0, 2.0));
        assert_eq!(q.kinks(), vec![1.0]);
    }

    #[test]
    fn centering_and_mirroring_are_translations_and_reflections() {
        let q = ShapedQuadrilateral::from_preset(Preset::trapezoid(), 0.0f64, 1.0).unwrap();
        let c = q.centered();
        assert_eq!((c.a(), c.b()), (-0.5, 0.5));
        assert!((c.upper(-0.5) - q.upper(0.0)).abs() < 1e-15);
        let m = c.mirrored();
        assert!((m.upper(0.5) - q.upper(0.0)).abs() < 1e-15);
        let mc = q.mirrored().centered();
        assert!((mc.upper(0.5) - q.upper(0.0)).abs() < 1e-15);
        assert!((mc.upper(-0.25) - q.upper(0.75)).abs() < 1e-15);
    }
}
