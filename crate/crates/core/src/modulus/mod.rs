//! Grid modulus engine.
//!
//! The modulus of a quadrilateral is the Dirichlet energy of the potential
//! with `u = 0` on `(z2, z3)`, `u = 1` on `(z4, z1)` and zero normal
//! derivative on the other two arcs. It is computed by a cut-cell
//! finite-volume scheme on tensor grids graded towards corners and marks,
//! on a sequence of refinements, and extrapolated.
//!
//! Exterior problems are either truncated at a far box with a natural
//! boundary condition (energy converges like the inverse square of the box
//! size, and grading makes a large box cheap) or inverted onto a bounded
//! domain.

mod assemble;
mod grid;
mod solve;
mod walk;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use assemble::{solve_on_grid, Grid, Scheme};
use grid::AxisSpec;
pub use solve::LinearSolver;
pub use walk::{Label, MarkedPolygon, MarkedWalk, Orientation};

use crate::error::{Error, Result};
use crate::geometry::MarkedSlitConfiguration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DirichletGrid,
    DiscreteExtremalLength,
    Analytic,
}

/// How an unbounded domain is made finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ExteriorStrategy {
    /// Far box of half-size `far_factor` times the obstacle size, with a
    /// natural boundary condition on it.
    Truncation,
    /// `z ↦ 1/(z - z0)`; the centroid of the obstacle when no center is
    /// given.
    Inversion { center: Option<(f64, f64)> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridOptions {
    /// Spacing at the foci on the coarsest level.
    pub h: f64,
    /// Spacing growth `γ`: the local spacing is about `h + γ d` at distance
    /// `d` from the nearest focus coordinate. Halved with `h` on refinement.
    pub grading: f64,
    /// Number of refinement levels (spacing `h, h/2, h/4, ...`).
    pub levels: u32,
    pub far_factor: f64,
    pub exterior: ExteriorStrategy,
    pub solver: LinearSolver,
    /// Refuse grids with more nodes than this.
    pub max_nodes: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            h: 0.05,
            grading: 0.1,
            levels: 3,
            far_factor: 100.0,
            exterior: ExteriorStrategy::Truncation,
            solver: LinearSolver::Cholesky,
            max_nodes: 12_000_000,
        }
    }
}

impl GridOptions {
    pub fn with_h(h: f64) -> Self {
        GridOptions { h, ..Default::default() }
    }

    /// A uniform grid of spacing `h`, single level.
    pub fn uniform(h: f64) -> Self {
        GridOptions { h, grading: 0.0, levels: 1, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing h = {} must be positive", self.h)));
        }
        if !(self.grading >= 0.0 && self.grading.is_finite()) {
            return Err(Error::InvalidParameter(format!("grading {} must be nonnegative", self.grading)));
        }
        if self.levels == 0 || self.levels > 8 {
            return Err(Error::InvalidParameter(format!("levels = {} not in 1..=8", self.levels)));
        }
        if !(self.far_factor >= 1.0) {
            return Err(Error::InvalidParameter(format!("far factor {} below 1", self.far_factor)));
        }
        Ok(())
    }
}

/// One refinement level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelValue {
    pub h: f64,
    pub value: f64,
    pub unknowns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    /// Best estimate: the extrapolated value when available.
    pub value: f64,
    pub method: Method,
    /// Finest spacing used.
    pub h: f64,
    pub extrapolated: Option<f64>,
    /// Observed convergence order, when three levels allow it.
    pub order: Option<f64>,
    pub error: f64,
    pub levels: Vec<LevelValue>,
}

impl ModulusEstimate {
    pub fn analytic(value: f64) -> Self {
        ModulusEstimate {
            value,
            method: Method::Analytic,
            h: 0.0,
            extrapolated: None,
            order: None,
            error: 0.0,
            levels: Vec::new(),
        }
    }

    /// Richardson extrapolation of a sequence computed at spacings halving
    /// from level to level.
    pub fn from_levels(method: Method, levels: Vec<LevelValue>) -> Result<Self> {
        let v: Vec<f64> = levels.iter().map(|l| l.value).collect();
        if v.is_empty() {
            return Err(Error::InvalidParameter("no refinement levels".into()));
        }
        let h = levels[levels.len() - 1].h;
        let last = v[v.len() - 1];
        let (value, extrapolated, order, error) = match v.len() {
            1 => (last, None, None, 0.0),
            2 => {
                // first order is the safe assumption with corner singularities
                let d = v[1] - v[0];
                (v[1] + d, Some(v[1] + d), None, d.abs())
            }
            n => {
                let (a, b, c) = (v[n - 3], v[n - 2], v[n - 1]);
                let (d1, d2) = (b - a, c - b);
                let ratio = d1 / d2;
                if d2 != 0.0 && ratio > 1.05 && ratio.is_finite() {
                    let p = ratio.log2().clamp(0.5, 3.0);
                    let x = c + d2 / (2f64.powf(p) - 1.0);
                    (x, Some(x), Some(p), (x - c).abs() + 0.25 * d2.abs())
                } else {
                    (c, None, None, d1.abs().max(d2.abs()))
                }
            }
        };
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::SingularSystem(format!("non-positive modulus estimate {value}")));
        }
        Ok(ModulusEstimate { value, method, h, extrapolated, order, error, levels })
    }

    /// Relative error estimate.
    pub fn rel_error(&self) -> f64 {
        self.error / self.value
    }
}

fn axis(foci: impl Iterator<Item = f64>, lo: f64, hi: f64, opts: &GridOptions) -> AxisSpec {
    AxisSpec { foci: foci.collect(), lo, hi, h: opts.h, grading: opts.grading }
}

fn grid_for(walk: &MarkedWalk, opts: &GridOptions, level: u32) -> Result<Grid> {
    let (lo, hi) = walk.bounds();
    let size = (hi.re - lo.re).max(hi.im - lo.im);
    let pad = if walk.bounded { 2.0 * opts.h } else { opts.far_factor * size };
    let ax = axis(walk.foci.iter().map(|z| z.re), lo.re - pad, hi.re + pad, opts);
    let ay = axis(walk.foci.iter().map(|z| z.im), lo.im - pad, hi.im + pad, opts);
    let xs = ax.lines(level);
    let ys = ay.lines(level);
    let nodes = xs.len().saturating_mul(ys.len());
    if nodes > opts.max_nodes {
        return Err(Error::InvalidParameter(format!(
            "grid of {}x{} nodes exceeds the limit of {}",
            xs.len(),
            ys.len(),
            opts.max_nodes
        )));
    }
    Ok(Grid { xs, ys })
}

/// Modulus of the quadrilateral described by a walk.
pub fn walk_modulus(walk: &MarkedWalk, opts: &GridOptions) -> Result<ModulusEstimate> {
    opts.validate()?;
    let walk = if walk.bounded {
        walk.clone()
    } else {
        match opts.exterior {
            ExteriorStrategy::Truncation => walk.clone(),
            ExteriorStrategy::Inversion { center } => {
                let (x, y) = center.ok_or_else(|| {
                    Error::InversionCenter("walks need an explicit inversion center".into())
                })?;
                walk.inverted(Complex64::new(x, y), 1e-7)?
            }
        }
    };
    // spacing is relative to the (possibly inverted) geometry
    let mut levels = Vec::with_capacity(opts.levels as usize);
    for level in 0..opts.levels {
        let grid = grid_for(&walk, opts, level)?;
        let r = solve_on_grid(&walk, &grid, opts.solver, Scheme::CutCell)?;
        log::debug!("level {level}: {}x{} grid, {} unknowns, energy {}", grid.xs.len(), grid.ys.len(), r.unknowns, r.energy);
        levels.push(LevelValue { h: opts.h / (1u64 << level) as f64, value: r.energy, unknowns: r.unknowns });
    }
    ModulusEstimate::from_levels(Method::DirichletGrid, levels)
}

/// `Mod(Q; z1, z2, z3, z4)` for an interior quadrilateral.
pub fn interior_modulus(p: &MarkedPolygon, opts: &GridOptions) -> Result<ModulusEstimate> {
    if p.orientation() != Orientation::Interior {
        return Err(Error::InvalidParameter("interior_modulus needs an interior polygon".into()));
    }
    walk_modulus(&p.walk(), opts)
}

/// `ExtMod(Q) = Mod(Q^c; z4, z3, z2, z1)`.
pub fn exterior_modulus(p: &MarkedPolygon, opts: &GridOptions) -> Result<ModulusEstimate> {
    if p.orientation() != Orientation::Exterior {
        return Err(Error::InvalidParameter("exterior_modulus needs an exterior polygon".into()));
    }
    let mut opts = *opts;
    if let ExteriorStrategy::Inversion { center: None } = opts.exterior {
        let c = p.centroid();
        if !p.contains(c) {
            return Err(Error::InversionCenter(format!("centroid {c} lies outside the polygon")));
        }
        opts.exterior = ExteriorStrategy::Inversion { center: Some((c.re, c.im)) };
    }
    if let ExteriorStrategy::Inversion { center: Some((x, y)) } = opts.exterior {
        let z0 = Complex64::new(x, y);
        if !p.contains(z0) {
            return Err(Error::InversionCenter(format!("z0 = {z0} is not inside the obstacle")));
        }
        // spacing h refers to the image, whose size is about 2 / dist
        let dist = p.boundary_distance(z0);
        opts.h *= 1.0 / dist;
    }
    walk_modulus(&p.walk(), &opts)
}

/// Modulus of a comparison configuration; slits have width `eps` (zero for
/// genuine slits).
pub fn configuration_modulus(cfg: &MarkedSlitConfiguration<f64>, eps: f64, opts: &GridOptions) -> Result<ModulusEstimate> {
    let walk = MarkedWalk::from_configuration(cfg, eps)?;
    let mut opts = *opts;
    opts.exterior = ExteriorStrategy::Truncation;
    walk_modulus(&walk, &opts)
}

/// Variable in which the thickened moduli are extrapolated to zero width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthExtrapolation {
    /// Straight line in `ε`.
    Linear,
    /// Straight line in `sqrt(ε)`. Marks at slit tips make the modulus
    /// behave like `c0 + c1 sqrt(ε)` under thickening.
    #[default]
    SquareRoot,
}

impl WidthExtrapolation {
    fn abscissa(self, eps: f64) -> f64 {
        match self {
            WidthExtrapolation::Linear => eps,
            WidthExtrapolation::SquareRoot => eps.sqrt(),
        }
    }
}

/// Moduli for slits thickened to each width in `eps`, extrapolated to zero
/// width by a least-squares line in the chosen variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThickenedEstimate {
    pub eps: Vec<f64>,
    pub values: Vec<ModulusEstimate>,
    pub extrapolation: WidthExtrapolation,
    pub extrapolated: ModulusEstimate,
}

pub fn thickened_configuration_modulus(
    cfg: &MarkedSlitConfiguration<f64>,
    eps: &[f64],
    extrapolation: WidthExtrapolation,
    opts: &GridOptions,
) -> Result<ThickenedEstimate> {
    if eps.len() < 2 || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("need at least two positive slit widths".into()));
    }
    let values: Vec<ModulusEstimate> = eps.iter().map(|&e| configuration_modulus(cfg, e, opts)).collect::<Result<_>>()?;
    let xs: Vec<f64> = eps.iter().map(|&e| extrapolation.abscissa(e)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = values.iter().map(|v| v.value).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&values).map(|(x, v)| (x - mx) * (v.value - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameter("slit widths must not all be equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = xs.iter().zip(&values).map(|(x, v)| (v.value - intercept - slope * x).abs()).fold(0.0, f64::max);
    // the intercept is a fixed linear combination of the values
    let grid_err: f64 = xs.iter().zip(&values).map(|(x, v)| (1.0 / n - mx * (x - mx) / sxx).abs() * v.error).sum();
    let h = values.iter().map(|v| v.h).fold(f64::INFINITY, f64::min);
    let extrapolated = ModulusEstimate {
        value: intercept,
        method: Method::DirichletGrid,
        h,
        extrapolated: Some(intercept),
        order: None,
        error: grid_err + resid,
        levels: Vec::new(),
    };
    if !(intercept > 0.0) {
        return Err(Error::SingularSystem(format!("width extrapolation gave {intercept}")));
    }
    Ok(ThickenedEstimate { eps: eps.to_vec(), values, extrapolation, extrapolated })
}

/// Effective resistance between the edges `(z1, z2)` and `(z3, z4)` of the
/// network of unit resistors joining neighbouring cell centres of a uniform
/// grid of spacing `h` inside the polygon.
pub fn discrete_extremal_length(p: &MarkedPolygon, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("spacing {h} must be positive")));
    }
    if p.orientation() != Orientation::Interior {
        return Err(Error::InvalidParameter("discrete extremal length needs an interior polygon".into()));
    }
    // Dirichlet arcs of the conjugate are (z1, z2) and (z3, z4)
    let walk = p.conjugate().walk();
    let (lo, hi) = walk.bounds();
    let cells = |a: f64, b: f64| ((b - a) / h).ceil() as usize;
    // one layer of outside cells so every boundary edge is seen
    let (nx, ny) = (cells(lo.re, hi.re) + 2, cells(lo.im, hi.im) + 2);
    let xs: Vec<f64> = (0..nx).map(|i| lo.re + (i as f64 - 0.5) * h).collect();
    let ys: Vec<f64> = (0..ny).map(|j| lo.im + (j as f64 - 0.5) * h).collect();
    let r = solve_on_grid(&walk, &Grid { xs, ys }, LinearSolver::pcg(), Scheme::UnitNetwork).map_err(|e| match e {
        Error::SingularSystem(m) => Error::Disconnected(m),
        e => e,
    })?;
    if !(r.energy > 0.0) {
        return Err(Error::Disconnected("edges (z1, z2) and (z3, z4) are not connected".into()));
    }
    Ok(1.0 / r.energy)
}

/// Result of a monotonicity comparison `lhs <= rhs + tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub holds: bool,
}

impl MonotonicityCheck {
    pub fn compare(lhs: &ModulusEstimate, rhs: &ModulusEstimate, rel_slack: f64) -> Self {
        let tol = lhs.error + rhs.error + rel_slack * lhs.value.max(rhs.value);
        MonotonicityCheck { lhs: lhs.value, rhs: rhs.value, tol, holds: lhs.value <= rhs.value + tol }
    }
}

const MONOTONE_SLACK: f64 = 1e-3;

/// Narrowing the edges `(z1, z2)` and `(z3, z4)` cannot decrease the
/// modulus: checks `Mod(p) <= Mod(p_narrowed)`.
pub fn check_monotonicity_narrowing(p: &MarkedWalk, p_narrowed: &MarkedWalk, opts: &GridOptions) -> Result<MonotonicityCheck> {
    let a = walk_modulus(p, opts)?;
    let b = walk_modulus(p_narrowed, opts)?;
    Ok(MonotonicityCheck::compare(&a, &b, MONOTONE_SLACK))
}

/// Shrinking the domain while keeping the marked edges cannot decrease the
/// modulus: checks `Mod(p) <= Mod(p_sub)`.
pub fn check_monotonicity_domain(p: &MarkedWalk, p_sub: &MarkedWalk, opts: &GridOptions) -> Result<MonotonicityCheck> {
    let a = walk_modulus(p, opts)?;
    let b = walk_modulus(p_sub, opts)?;
    Ok(MonotonicityCheck::compare(&a, &b, MONOTONE_SLACK))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical;
    use crate::geometry::{build_configuration, ConfigKind};

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn quad(v: [Complex64; 4], o: Orientation) -> MarkedPolygon {
        MarkedPolygon::new(v.to_vec(), v, o).unwrap()
    }

    #[test]
    fn rectangles() {
        for m in [0.5, 1.0, 2.0] {
            let p = quad([c(0., 0.), c(1., 0.), c(1., m), c(0., m)], Orientation::Interior);
            let e = interior_modulus(&p, &GridOptions::with_h(0.05)).unwrap();
            assert!((e.value - m).abs() < 1e-8 * m, "{m}: {e:?}");
        }
    }

    #[test]
    fn conjugate_duality_on_quadrilateral() {
        let p = quad([c(0., 0.), c(2., 0.3), c(1.6, 1.4), c(0.2, 1.0)], Orientation::Interior);
        let opts = GridOptions::with_h(0.02);
        let a = interior_modulus(&p, &opts).unwrap();
        let b = interior_modulus(&p.conjugate(), &opts).unwrap();
        assert!((a.value * b.value - 1.0).abs() < 2e-3, "{} {} {:?}", a.value, b.value, a);
    }

    #[test]
    fn exterior_square_is_one() {
        let p = quad([c(-1., -1.), c(1., -1.), c(1., 1.), c(-1., 1.)], Orientation::Exterior);
        let e = exterior_modulus(&p, &GridOptions::with_h(0.02)).unwrap();
        assert!((e.value - 1.0).abs() < 5e-3, "{e:?}");
        let opts = GridOptions { exterior: ExteriorStrategy::Inversion { center: None }, ..GridOptions::with_h(0.02) };
        let f = exterior_modulus(&p, &opts).unwrap();
        assert!((f.value - 1.0).abs() < 5e-3, "{f:?}");
    }

    #[test]
    fn slit_configuration_matches_analytic() {
        let cfg = build_configuration(ConfigKind::Gstar3H, 1.0, 1.0, 1.0, None, 10.0).unwrap();
        let exact = canonical::mod_gstar3h(&canonical::solve(10.0, 1.0, 1.0, 1.0).unwrap());
        let e = configuration_modulus(&cfg, 0.0, &GridOptions::with_h(0.05)).unwrap();
        assert!((e.value / exact - 1.0).abs() < 5e-3, "{} vs {exact}: {e:?}", e.value);
    }

    #[test]
    fn discrete_extremal_length_of_rectangles() {
        let sq = quad([c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.)], Orientation::Interior);
        assert!((discrete_extremal_length(&sq, 1.0 / 64.0).unwrap() - 1.0).abs() < 0.05);
        let r = quad([c(0., 0.), c(1., 0.), c(1., 2.), c(0., 2.)], Orientation::Interior);
        assert!((discrete_extremal_length(&r, 1.0 / 64.0).unwrap() - 2.0).abs() < 0.1);
    }
}
