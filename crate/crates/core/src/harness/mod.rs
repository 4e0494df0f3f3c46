//! H-sweeps of the bounds chain, the interior contrast law, and the
//! aggregated invariant report.

pub mod config;
pub mod output;
pub mod verify;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{Outputs, RunConfig, SampleTable, ShapeSpec};
pub use output::{csv_string, fmt17, to_json_string, CsvRecord};
pub use verify::{verify_all, Check, VerifyReport};

use crate::canonical;
use crate::error::{Error, Result};
use crate::geometry::{
    build_configuration, end_parameters, midcurve_polyline, rectangle_height_for, straighten_shape, stretch, ConfigKind,
    EndParameters, Midcurve, ShapedQuadrilateral,
};
use crate::modulus::{
    configuration_modulus, exterior_modulus, interior_modulus, GridOptions, MarkedPolygon, ModulusEstimate, Orientation,
};
use output::opt17;

/// Environment variable capping the worker threads of sweeps.
pub const THREADS_ENV: &str = "EXTMOD_THREADS";

/// Relative slack added to every combined numeric tolerance.
pub const REL_SLACK: f64 = 1e-3;

/// Runs `f` on a pool sized by `EXTMOD_THREADS` (all cores when unset).
pub fn with_thread_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| Error::Input(format!("{THREADS_ENV} = '{v}' is not a positive integer")))?,
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// `(1/π) ln H`.
pub fn target(h: f64) -> f64 {
    h.ln() / PI
}

/// Shape data shared by every H of a sweep.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub shape: ShapedQuadrilateral<f64>,
    pub mid: Midcurve<f64>,
    /// Straightened, centred and (if needed) mirrored shape.
    pub straightened: ShapedQuadrilateral<f64>,
    pub ends: EndParameters<f64>,
    /// Rectangle half-height of the upper-bound configuration.
    pub m: f64,
    /// Straightening is a translation (flat midline, centred, unmirrored).
    pub trivial: bool,
}

impl Prepared {
    pub fn new(config: &RunConfig) -> Result<Self> {
        let shape = config.shape.build()?;
        let mid = midcurve_polyline(&shape, config.midcurve_segments)?;
        let (straightened, ends) = end_parameters(&straighten_shape(&shape, &mid));
        let m = rectangle_height_for(&straightened);
        let flat = mid.heights().iter().all(|&y| y == 0.0);
        let trivial = flat && !ends.mirrored && shape.a() == -shape.b();
        Ok(Prepared { shape, mid, straightened, ends, m, trivial })
    }
}

/// One row of an H-sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "H")]
    pub h: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mirrored: bool,
    pub k: f64,
    pub one_minus_k: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Distortion bound `K_H` of the straightening map.
    pub k_h: f64,
    /// `Mod(G*_3H)`, analytic.
    pub lower: f64,
    /// `(1/π) ln(1/(1 - k))`.
    pub lower_asymptotic: f64,
    /// `Mod(G~_2H)` by the grid engine.
    pub upper: f64,
    pub upper_error: f64,
    /// `ExtMod(Q_1H)`.
    pub ext_straightened: f64,
    pub ext_straightened_error: f64,
    /// `ExtMod(Q_H)`, when computed.
    pub ext_direct: Option<f64>,
    pub ext_direct_error: Option<f64>,
    pub target: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
    pub ratio_straightened: f64,
    pub ratio_direct: Option<f64>,
    /// `ExtMod(Q_1H) / ExtMod(Q_H)`.
    pub quasi_ratio: Option<f64>,
    pub sandwich_ok: bool,
    pub quasi_ok: Option<bool>,
}

impl CsvRecord for SweepRow {
    const HEADER: &'static [&'static str] = &[
        "H",
        "alpha",
        "beta",
        "sigma",
        "mirrored",
        "k",
        "one_minus_k",
        "lambda",
        "mu",
        "k_h",
        "lower",
        "lower_asymptotic",
        "upper",
        "upper_error",
        "ext_straightened",
        "ext_straightened_error",
        "ext_direct",
        "ext_direct_error",
        "target",
        "ratio_lower",
        "ratio_upper",
        "ratio_straightened",
        "ratio_direct",
        "quasi_ratio",
        "sandwich_ok",
        "quasi_ok",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            fmt17(self.h),
            fmt17(self.alpha),
            fmt17(self.beta),
            fmt17(self.sigma),
            self.mirrored.to_string(),
            fmt17(self.k),
            fmt17(self.one_minus_k),
            fmt17(self.lambda),
            fmt17(self.mu),
            fmt17(self.k_h),
            fmt17(self.lower),
            fmt17(self.lower_asymptotic),
            fmt17(self.upper),
            fmt17(self.upper_error),
            fmt17(self.ext_straightened),
            fmt17(self.ext_straightened_error),
            opt17(self.ext_direct),
            opt17(self.ext_direct_error),
            fmt17(self.target),
            fmt17(self.ratio_lower),
            fmt17(self.ratio_upper),
            fmt17(self.ratio_straightened),
            opt17(self.ratio_direct),
            opt17(self.quasi_ratio),
            self.sandwich_ok.to_string(),
            self.quasi_ok.map(|b| b.to_string()).unwrap_or_default(),
        ]
    }
}

/// `lo <= hi` within the combined error bars and [`REL_SLACK`].
pub fn le_within(lo: f64, lo_err: f64, hi: f64, hi_err: f64) -> bool {
    lo <= hi + lo_err + hi_err + REL_SLACK * lo.abs().max(hi.abs())
}

/// Whether `ratio` lies in `[1/K, K]` widened by `tol`.
pub fn within_distortion(ratio: f64, k: f64, tol: f64) -> bool {
    ratio >= 1.0 / k - tol && ratio <= k + tol
}

/// `ExtMod` of the stretched shape.
pub fn exterior_of(shape: &ShapedQuadrilateral<f64>, h: f64, samples: usize, grid: &GridOptions) -> Result<ModulusEstimate> {
    let p = MarkedPolygon::from_stretched(&stretch(shape, h)?, samples, Orientation::Exterior)?;
    exterior_modulus(&p, grid)
}

/// Computes one sweep row.
pub fn sweep_point(config: &RunConfig, prep: &Prepared, h: f64) -> Result<SweepRow> {
    let run = || -> Result<SweepRow> {
        let EndParameters { alpha, beta, sigma, mirrored } = prep.ends;
        let params = canonical::solve(h, alpha, beta, sigma)?;
        let lower = canonical::mod_gstar3h(&params);
        let cfg = build_configuration(ConfigKind::Gtilde2H, alpha, beta, sigma, Some(prep.m), h)?;
        let upper = configuration_modulus(&cfg, 0.0, &config.grid)?;
        let ext1 = exterior_of(&prep.straightened, h, config.boundary_samples, &config.grid)?;
        let direct = if !config.direct {
            None
        } else if prep.trivial {
            Some(ext1.clone())
        } else {
            Some(exterior_of(&prep.shape, h, config.boundary_samples, &config.grid)?)
        };
        let (_, k_h) = prep.mid.at_stretch(h)?.qc_coefficient();
        let t = target(h);
        let mut sandwich_ok = le_within(lower, 0.0, ext1.value, ext1.error)
            && le_within(ext1.value, ext1.error, upper.value, upper.error);
        let mut quasi_ratio = None;
        let mut quasi_ok = None;
        if let Some(d) = &direct {
            sandwich_ok &= le_within(lower, 0.0, d.value, d.error) && le_within(d.value, d.error, upper.value, upper.error);
            let r = ext1.value / d.value;
            quasi_ratio = Some(r);
            quasi_ok = Some(within_distortion(r, k_h, ext1.rel_error() + d.rel_error() + REL_SLACK));
        }
        Ok(SweepRow {
            h,
            alpha,
            beta,
            sigma,
            mirrored,
            k: params.k,
            one_minus_k: params.one_minus_k,
            lambda: params.lambda,
            mu: params.mu,
            k_h,
            lower,
            lower_asymptotic: canonical::asym_lower(&params),
            upper: upper.value,
            upper_error: upper.error,
            ext_straightened: ext1.value,
            ext_straightened_error: ext1.error,
            ext_direct: direct.as_ref().map(|d| d.value),
            ext_direct_error: direct.as_ref().map(|d| d.error),
            target: t,
            ratio_lower: lower / t,
            ratio_upper: upper.value / t,
            ratio_straightened: ext1.value / t,
            ratio_direct: direct.as_ref().map(|d| d.value / t),
            quasi_ratio,
            sandwich_ok,
            quasi_ok,
        })
    };
    run().map_err(|e| match e {
        e @ Error::AtStretch { .. } => e,
        e => e.at_stretch(h),
    })
}

/// One row per H, in the order of the config.
pub fn sweep(config: &RunConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let prep = Prepared::new(config)?;
    with_thread_pool(|| config.h_values.par_iter().map(|&h| sweep_point(config, &prep, h)).collect())?
}

/// Interior modulus against the law `Mod(Q_H) ~ cH`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastRow {
    #[serde(rename = "H")]
    pub h: f64,
    pub c: f64,
    pub modulus: f64,
    pub error: f64,
    pub ratio: f64,
}

impl CsvRecord for ContrastRow {
    const HEADER: &'static [&'static str] = &["H", "c", "modulus", "error", "ratio"];

    fn fields(&self) -> Vec<String> {
        vec![fmt17(self.h), fmt17(self.c), fmt17(self.modulus), fmt17(self.error), fmt17(self.ratio)]
    }
}

pub fn interior_contrast(config: &RunConfig) -> Result<Vec<ContrastRow>> {
    config.validate()?;
    let shape = config.shape.build()?;
    let c = shape.interior_constant()?;
    let row = |h: f64| -> Result<ContrastRow> {
        let p = MarkedPolygon::from_stretched(&stretch(&shape, h)?, config.boundary_samples, Orientation::Interior)?;
        let e = interior_modulus(&p, &config.grid).map_err(|e| e.at_stretch(h))?;
        Ok(ContrastRow { h, c, modulus: e.value, error: e.error, ratio: e.value / (c * h) })
    };
    with_thread_pool(|| config.h_values.par_iter().map(|&h| row(h)).collect())?
}

/// Writes the configured CSV/JSON outputs of a sweep.
pub fn write_outputs(config: &RunConfig, rows: &[SweepRow]) -> Result<()> {
    let io = |p: &std::path::Path, e: std::io::Error| Error::Input(format!("{}: {e}", p.display()));
    if let Some(p) = &config.outputs.csv {
        std::fs::write(p, csv_string(rows)?).map_err(|e| io(p, e))?;
    }
    if let Some(p) = &config.outputs.json {
        std::fs::write(p, to_json_string(&rows)? + "\n").map_err(|e| io(p, e))?;
    }
    Ok(())
}

/// Analytic side of the chain at one `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    #[serde(rename = "H")]
    pub h: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub k: f64,
    pub one_minus_k: f64,
    pub lambda: f64,
    pub mu: f64,
    pub c: f64,
    pub r1: f64,
    pub r2: f64,
    /// `Mod(G*_3H)`.
    pub lower: f64,
    pub lower_asymptotic: f64,
    pub target: f64,
    pub ratio_lower: f64,
}

impl CsvRecord for BoundsRow {
    const HEADER: &'static [&'static str] = &[
        "H",
        "alpha",
        "beta",
        "sigma",
        "k",
        "one_minus_k",
        "lambda",
        "mu",
        "c",
        "r1",
        "r2",
        "lower",
        "lower_asymptotic",
        "target",
        "ratio_lower",
    ];

    fn fields(&self) -> Vec<String> {
        [
            self.h,
            self.alpha,
            self.beta,
            self.sigma,
            self.k,
            self.one_minus_k,
            self.lambda,
            self.mu,
            self.c,
            self.r1,
            self.r2,
            self.lower,
            self.lower_asymptotic,
            self.target,
            self.ratio_lower,
        ]
        .into_iter()
        .map(fmt17)
        .collect()
    }
}

pub fn bounds(h: f64, alpha: f64, beta: f64, sigma: f64) -> Result<BoundsRow> {
    if !(h > 1.0 && h.is_finite()) {
        return Err(Error::Input(format!("H = {h} must be finite and > 1")));
    }
    let p = canonical::solve(h, alpha, beta, sigma)?;
    let lower = canonical::mod_gstar3h(&p);
    Ok(BoundsRow {
        h,
        alpha,
        beta,
        sigma,
        k: p.k,
        one_minus_k: p.one_minus_k,
        lambda: p.lambda,
        mu: p.mu,
        c: p.c,
        r1: p.r1(),
        r2: p.r2(),
        lower,
        lower_asymptotic: canonical::asym_lower(&p),
        target: target(h),
        ratio_lower: lower / target(h),
    })
}
