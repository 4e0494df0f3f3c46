//! Boundary walks: closed vertex chains keeping the domain on the left,
//! with four marked vertices splitting the walk into labelled arcs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConfigKind, MarkedSlitConfiguration, ShapedQuadrilateral, StretchedQuadrilateral};

/// Whether the quadrilateral is the bounded polygon or its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Interior,
    Exterior,
}

/// Boundary condition carried by a walk segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Label {
    Neumann,
    Dirichlet(f64),
}

/// A simple polygon (vertices counterclockwise) with four marked boundary
/// points `z1..z4` in counterclockwise order along the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPolygon {
    vertices: Vec<Complex64>,
    marks: [Complex64; 4],
    orientation: Orientation,
}

const ON_BOUNDARY: f64 = 1e-9;

fn scale_of(points: &[Complex64]) -> f64 {
    let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in points {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    (hi.re - lo.re).max(hi.im - lo.im)
}

fn signed_area(v: &[Complex64]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].re * v[(i + 1) % n].im - v[(i + 1) % n].re * v[i].im).sum::<f64>() * 0.5
}

// parameter of the projection of p on segment ab and its distance
fn project(p: Complex64, a: Complex64, b: Complex64) -> (f64, f64) {
    let d = b - a;
    let len2 = d.norm_sqr();
    let t = if len2 == 0.0 { 0.0 } else { ((p - a) * d.conj()).re / len2 };
    let t = t.clamp(0.0, 1.0);
    (t, (a + d * t - p).norm())
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    ((b - a).conj() * (c - a)).im
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let (d1, d2) = (orient(a, b, c), orient(a, b, d));
    let (d3, d4) = (orient(c, d, a), orient(c, d, b));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Complex64, q: Complex64, r: Complex64, o: f64| {
        o == 0.0 && r.re >= p.re.min(q.re) && r.re <= p.re.max(q.re) && r.im >= p.im.min(q.im) && r.im <= p.im.max(q.im)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

fn is_simple(v: &[Complex64]) -> bool {
    let n = v.len();
    let mut segs: Vec<(usize, f64, f64)> = (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            (i, a.re.min(b.re), a.re.max(b.re))
        })
        .collect();
    segs.sort_by(|p, q| p.1.total_cmp(&q.1));
    for (s, &(i, _, xmax)) in segs.iter().enumerate() {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for &(j, xmin_j, _) in &segs[s + 1..] {
            if xmin_j > xmax {
                break;
            }
            if (i + 1) % n == j || (j + 1) % n == i {
                continue;
            }
            if segments_cross(a, b, v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

impl MarkedPolygon {
    /// Validates and stores a marked polygon. A clockwise chain is reversed;
    /// the marks must then lie on the boundary in counterclockwise order.
    pub fn new(vertices: Vec<Complex64>, marks: [Complex64; 4], orientation: Orientation) -> Result<Self> {
        let mut vertices = vertices;
        if vertices.len() > 1 && (vertices[0] - vertices[vertices.len() - 1]).norm() == 0.0 {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::InvalidShape(format!("polygon needs >= 3 vertices, got {}", vertices.len())));
        }
        if vertices.iter().chain(marks.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidShape("non-finite coordinate".into()));
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(Error::InvalidShape("polygon has zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        if !is_simple(&vertices) {
            return Err(Error::InvalidShape("polygon chain intersects itself".into()));
        }
        let p = MarkedPolygon { vertices, marks, orientation };
        p.mark_positions()?;
        Ok(p)
    }

    /// The stretched quadrilateral `Q_H` sampled with `n` points per
    /// boundary curve, marks `z1 = D, z2 = A, z3 = B, z4 = C`.
    pub fn from_stretched(q: &StretchedQuadrilateral<f64>, n: usize, orientation: Orientation) -> Result<Self> {
        Self::sampled(q.base(), q.h(), n, orientation)
    }

    /// The unstretched shape, marked as in [`MarkedPolygon::from_stretched`].
    pub fn from_shape(q: &ShapedQuadrilateral<f64>, n: usize, orientation: Orientation) -> Result<Self> {
        Self::sampled(q, 1.0, n, orientation)
    }

    fn sampled(base: &ShapedQuadrilateral<f64>, h: f64, n: usize, orientation: Orientation) -> Result<Self> {
        let n = n.max(2);
        let mut xs: Vec<f64> = (0..n).map(|i| base.a() + (base.b() - base.a()) * i as f64 / (n - 1) as f64).collect();
        xs.extend(base.kinks());
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + a.abs()));
        let mut v = Vec::with_capacity(2 * xs.len());
        for &x in &xs {
            v.push(Complex64::new(x * h, base.lower(x)));
        }
        for &x in xs.iter().rev() {
            v.push(Complex64::new(x * h, base.upper(x)));
        }
        let [a, b, c, d] = base.vertices().map(|z| Complex64::new(z.re * h, z.im));
        MarkedPolygon::new(v, [d, a, b, c], orientation)
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn marks(&self) -> [Complex64; 4] {
        self.marks
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        MarkedPolygon { orientation, ..self.clone() }
    }

    /// Same domain with the marks rotated by one, `(z2, z3, z4, z1)`.
    pub fn conjugate(&self) -> Self {
        let m = self.marks;
        MarkedPolygon { marks: [m[1], m[2], m[3], m[0]], ..self.clone() }
    }

    /// Same domain with new marks.
    pub fn with_marks(&self, marks: [Complex64; 4]) -> Result<Self> {
        MarkedPolygon::new(self.vertices.clone(), marks, self.orientation)
    }

    /// Image under `z ↦ a z + b` with `a != 0`.
    pub fn map_similarity(&self, a: Complex64, b: Complex64) -> Result<Self> {
        if a.norm() == 0.0 {
            return Err(Error::InvalidParameter("similarity with zero factor".into()));
        }
        MarkedPolygon::new(self.vertices.iter().map(|z| a * z + b).collect(), self.marks.map(|z| a * z + b), self.orientation)
    }

    /// Vertex-average centroid of the area (shoelace formula).
    pub fn centroid(&self) -> Complex64 {
        let v = &self.vertices;
        let n = v.len();
        let mut c = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let (p, q) = (v[i], v[(i + 1) % n]);
            let cross = p.re * q.im - q.re * p.im;
            c += (p + q) * cross;
        }
        c / (6.0 * signed_area(v))
    }

    /// Distance from `z` to the polygon boundary.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let n = self.vertices.len();
        (0..n).map(|i| project(z, self.vertices[i], self.vertices[(i + 1) % n]).1).fold(f64::INFINITY, f64::min)
    }

    /// Whether `z` lies strictly inside the bounded polygon.
    pub fn contains(&self, z: Complex64) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let mut wind = 0;
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            if (a.im <= z.im) != (b.im <= z.im) {
                let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                if x > z.re {
                    wind += if b.im > a.im { 1 } else { -1 };
                }
            }
        }
        wind != 0
    }

    // (segment index, parameter) of each mark along the chain
    fn mark_positions(&self) -> Result<[(usize, f64); 4]> {
        let n = self.vertices.len();
        let tol = ON_BOUNDARY * scale_of(&self.vertices);
        let mut pos = [(0usize, 0.0f64); 4];
        for (k, &m) in self.marks.iter().enumerate() {
            let mut best = (usize::MAX, 0.0, f64::INFINITY);
            for i in 0..n {
                let (t, d) = project(m, self.vertices[i], self.vertices[(i + 1) % n]);
                if d < best.2 {
                    best = (i, t, d);
                }
            }
            if best.2 > tol {
                return Err(Error::InvalidShape(format!("mark z{} = {m} is {:.3e} off the boundary", k + 1, best.2)));
            }
            // a mark at the end of a segment is the start of the next one
            pos[k] = if best.1 >= 1.0 { ((best.0 + 1) % n, 0.0) } else { (best.0, best.1) };
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if (self.marks[i] - self.marks[j]).norm() <= tol {
                    return Err(Error::InvalidShape(format!("marks z{} and z{} coincide", i + 1, j + 1)));
                }
            }
        }
        let key = |p: (usize, f64)| p.0 as f64 + p.1;
        let base = key(pos[0]);
        let rel: Vec<f64> = pos.iter().map(|&p| (key(p) - base).rem_euclid(n as f64)).collect();
        if !(rel[1] < rel[2] && rel[2] < rel[3]) {
            return Err(Error::InvalidShape("marks are not in counterclockwise cyclic order".into()));
        }
        Ok(pos)
    }

    /// The boundary walk used by the grid engine: counterclockwise with
    /// marks `(z1, z2, z3, z4)` for the interior, clockwise with
    /// `(z4, z3, z2, z1)` for the exterior.
    pub fn walk(&self) -> MarkedWalk {
        let n = self.vertices.len();
        let pos = self.mark_positions().expect("validated at construction");
        let mut points = Vec::with_capacity(n + 4);
        let mut mark_idx = [0usize; 4];
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&i, &j| (pos[i].0, pos[i].1).partial_cmp(&(pos[j].0, pos[j].1)).unwrap());
        let mut next = 0;
        for s in 0..n {
            points.push(self.vertices[s]);
            let start = points.len() - 1;
            while next < 4 && pos[order[next]].0 == s {
                let k = order[next];
                if pos[k].1 == 0.0 {
                    mark_idx[k] = start;
                } else {
                    points.push(self.marks[k]);
                    mark_idx[k] = points.len() - 1;
                }
                next += 1;
            }
        }
        let corners: Vec<Complex64> = corner_points(&self.vertices);
        let foci: Vec<Complex64> = corners.into_iter().chain(self.marks.iter().copied()).collect();
        match self.orientation {
            Orientation::Interior => MarkedWalk { points, marks: mark_idx, bounded: true, foci },
            Orientation::Exterior => {
                let m = points.len();
                points.reverse();
                let r = |i: usize| m - 1 - i;
                let marks = [r(mark_idx[3]), r(mark_idx[2]), r(mark_idx[1]), r(mark_idx[0])];
                MarkedWalk { points, marks, bounded: false, foci }
            }
        }
    }
}

// vertices where the chain turns by more than a few degrees
fn corner_points(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    let mut out = Vec::new();
    for i in 0..n {
        let a = v[(i + n - 1) % n];
        let b = v[i];
        let c = v[(i + 1) % n];
        let (u, w) = (b - a, c - b);
        if u.norm() == 0.0 || w.norm() == 0.0 {
            out.push(b);
            continue;
        }
        let turn = (w * u.conj()).arg().abs();
        if turn > 0.1 {
            out.push(b);
        }
    }
    out
}

/// A closed boundary walk with the domain on its left.
///
/// `bounded` walks run counterclockwise around a bounded domain; unbounded
/// ones run clockwise around the complement of a compact obstacle, which
/// may include zero-width slits traversed once on each side. Segment `s`
/// joins `points[s]` to `points[s + 1]` (cyclically). The arcs
/// `(w1, w2)` and `(w3, w4)` are Neumann; `u = 0` on `(w2, w3)` and
/// `u = 1` on `(w4, w1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedWalk {
    pub(crate) points: Vec<Complex64>,
    pub(crate) marks: [usize; 4],
    pub(crate) bounded: bool,
    /// Corners, tips and marks; the grid is refined around these.
    pub(crate) foci: Vec<Complex64>,
}

impl MarkedWalk {
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn marks(&self) -> [Complex64; 4] {
        self.marks.map(|i| self.points[i])
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    /// Label of every segment.
    pub fn labels(&self) -> Vec<Label> {
        let n = self.points.len();
        let mut labels = vec![Label::Neumann; n];
        for arc in 0..4 {
            let label = match arc {
                1 => Label::Dirichlet(0.0),
                3 => Label::Dirichlet(1.0),
                _ => Label::Neumann,
            };
            let (start, end) = (self.marks[arc], self.marks[(arc + 1) % 4]);
            let mut s = start;
            while s != end {
                labels[s] = label;
                s = (s + 1) % n;
            }
        }
        labels
    }

    /// Bounding box `(lo, hi)`.
    pub fn bounds(&self) -> (Complex64, Complex64) {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        (lo, hi)
    }

    /// Image of an unbounded walk under `z ↦ 1/(z - z0)`, a bounded walk.
    /// Segments are subdivided until each image arc is resolved to
    /// `rel_tol` of the image diameter.
    pub fn inverted(&self, z0: Complex64, rel_tol: f64) -> Result<MarkedWalk> {
        if self.bounded {
            return Err(Error::InvalidParameter("inversion applies to exterior walks".into()));
        }
        let n = self.points.len();
        let dist = (0..n).map(|i| project(z0, self.points[i], self.points[(i + 1) % n]).1).fold(f64::INFINITY, f64::min);
        let (lo, hi) = self.bounds();
        let size = (hi.re - lo.re).max(hi.im - lo.im);
        if !(dist > 1e-9 * size) {
            return Err(Error::InversionCenter(format!("z0 = {z0} lies {dist:.3e} from the boundary")));
        }
        let map = |z: Complex64| 1.0 / (z - z0);
        let diameter = 2.0 / dist;
        let tol = rel_tol * diameter;
        let mut points = Vec::new();
        let mut marks = [0usize; 4];
        for s in 0..n {
            for (k, &m) in self.marks.iter().enumerate() {
                if m == s {
                    marks[k] = points.len();
                }
            }
            let (a, b) = (self.points[s], self.points[(s + 1) % n]);
            points.push(map(a));
            subdivide(&map, a, b, tol, 0, &mut points);
        }
        let foci = self.foci.iter().map(|&z| map(z)).collect();
        Ok(MarkedWalk { points, marks, bounded: true, foci })
    }

    /// Walk around a comparison configuration. Slits have width `eps`
    /// (zero for genuine slits, which are then walked once on each side).
    pub fn from_configuration(cfg: &MarkedSlitConfiguration<f64>, eps: f64) -> Result<MarkedWalk> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("slit width {eps} must be nonnegative")));
        }
        let x = cfg.half_width();
        let c = Complex64::new;
        let mut pts: Vec<Complex64> = Vec::new();
        let mut marks = [usize::MAX; 4];
        let mut push = |p: Complex64, mark: Option<usize>, pts: &mut Vec<Complex64>| {
            if pts.last().map_or(true, |q| (*q - p).norm() > 0.0) {
                pts.push(p);
            }
            if let Some(k) = mark {
                marks[k] = pts.len() - 1;
            }
        };
        match cfg.kind {
            ConfigKind::G2H | ConfigKind::Gtilde2H => {
                let m = cfg.m.ok_or_else(|| Error::InvalidParameter("rectangle configuration without M".into()))?;
                let y1 = cfg.marks[0].z.im;
                push(c(x, y1), Some(0), &mut pts);
                push(c(x, -y1), Some(1), &mut pts);
                push(c(x, -m), None, &mut pts);
                push(c(-x, -m), None, &mut pts);
                push(c(-x, -cfg.sigma), Some(2), &mut pts);
                push(c(-x, cfg.sigma), Some(3), &mut pts);
                push(c(-x, m), None, &mut pts);
                push(c(x, m), None, &mut pts);
            }
            ConfigKind::G3H | ConfigKind::Gtilde3H | ConfigKind::Gstar3H => {
                let (br, bl) = cfg.slit_half_heights().expect("slit kind");
                let w = 0.5 * eps;
                if !(w < x) || !(w < br.min(bl)) {
                    return Err(Error::InvalidParameter(format!("slit width {eps} too large for the configuration")));
                }
                let right_inner = cfg.kind != ConfigKind::G3H;
                let left_inner = cfg.kind == ConfigKind::Gstar3H;
                let s = cfg.sigma;
                // clockwise from the top of the right slit
                if right_inner {
                    push(c(x - w, s), Some(0), &mut pts);
                    push(c(x - w, br), None, &mut pts);
                }
                push(c(x - w, br), None, &mut pts);
                push(c(x, br), if right_inner { None } else { Some(0) }, &mut pts);
                push(c(x + w, br), None, &mut pts);
                push(c(x + w, -br), None, &mut pts);
                push(c(x, -br), if right_inner { None } else { Some(1) }, &mut pts);
                push(c(x - w, -br), None, &mut pts);
                if right_inner {
                    push(c(x - w, -s), Some(1), &mut pts);
                }
                push(c(x - w, -w), None, &mut pts);
                push(c(-x + w, -w), None, &mut pts);
                if left_inner {
                    push(c(-x + w, -s), Some(2), &mut pts);
                }
                push(c(-x + w, -bl), None, &mut pts);
                push(c(-x, -bl), if left_inner { None } else { Some(2) }, &mut pts);
                push(c(-x - w, -bl), None, &mut pts);
                push(c(-x - w, bl), None, &mut pts);
                push(c(-x, bl), if left_inner { None } else { Some(3) }, &mut pts);
                push(c(-x + w, bl), None, &mut pts);
                if left_inner {
                    push(c(-x + w, s), Some(3), &mut pts);
                }
                push(c(-x + w, w), None, &mut pts);
                push(c(x - w, w), None, &mut pts);
                if right_inner {
                    // closes back onto w1
                } else {
                    push(c(x - w, br), None, &mut pts);
                }
                if (pts[0] - pts[pts.len() - 1]).norm() == 0.0 {
                    pts.pop();
                }
            }
        }
        if marks.iter().any(|&m| m == usize::MAX) {
            return Err(Error::InvalidParameter("configuration marks could not be placed".into()));
        }
        let mut foci = pts.clone();
        foci.extend(cfg.marks.iter().map(|m| m.z));
        Ok(MarkedWalk { points: pts, marks, bounded: false, foci })
    }
}

fn subdivide<F: Fn(Complex64) -> Complex64>(map: &F, a: Complex64, b: Complex64, tol: f64, depth: u32, out: &mut Vec<Complex64>) {
    let (ia, ib) = (map(a), map(b));
    let mid = (a + b) * 0.5;
    let im = map(mid);
    if depth < 2 || (depth < 30 && (im - (ia + ib) * 0.5).norm() > tol) {
        subdivide(map, a, mid, tol, depth + 1, out);
        out.push(im);
        subdivide(map, mid, b, tol, depth + 1, out);
    }
}
