//! Invariant suites of every module, aggregated into one report.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::output::{fmt17, opt17, CsvRecord};
use super::{sweep, Prepared, RunConfig, SweepRow};
use crate::canonical;
use crate::elliptic::{self, EllipticModulusPair, SeriesTruncation};
use crate::error::Result;
use crate::geometry::{build_configuration, stretch, ConfigKind};
use crate::modulus::{
    check_monotonicity_domain, check_monotonicity_narrowing, configuration_modulus, exterior_modulus,
    interior_modulus, thickened_configuration_modulus, MarkedPolygon, MarkedWalk, MonotonicityCheck,
    Orientation,
};

/// One pass/fail line of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    /// The measured quantity (a residual, ratio or difference).
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn below(suite: &str, name: impl Into<String>, value: f64, tol: f64) -> Self {
        Check {
            suite: suite.into(),
            name: name.into(),
            value: Some(value),
            tolerance: Some(tol),
            passed: value.is_finite() && value < tol,
            detail: format!("{} < {}", fmt17(value), fmt17(tol)),
        }
    }

    fn flag(suite: &str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { suite: suite.into(), name: name.into(), value: None, tolerance: None, passed, detail: detail.into() }
    }

    fn failed(suite: &str, name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self::flag(suite, name, false, err.to_string())
    }

    fn monotone(suite: &str, name: impl Into<String>, r: Result<MonotonicityCheck>) -> Self {
        match r {
            Ok(m) => Check {
                suite: suite.into(),
                name: name.into(),
                value: Some(m.lhs - m.rhs),
                tolerance: Some(m.tol),
                passed: m.holds,
                detail: format!("lhs {} rhs {}", fmt17(m.lhs), fmt17(m.rhs)),
            },
            Err(e) => Self::failed(suite, name, e),
        }
    }
}

impl CsvRecord for Check {
    const HEADER: &'static [&'static str] = &["suite", "name", "value", "tolerance", "passed", "detail"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.suite.clone(),
            self.name.clone(),
            opt17(self.value),
            opt17(self.tolerance),
            self.passed.to_string(),
            self.detail.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub sweep: Vec<SweepRow>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs every suite on `config`. Only an invalid config is an error;
/// numerical failures become failed checks.
pub fn verify_all(config: &RunConfig) -> Result<VerifyReport> {
    config.validate()?;
    let prep = Prepared::new(config)?;
    let mut checks = elliptic_checks();
    checks.extend(canonical_checks(config, &prep));
    checks.extend(modulus_checks(config, &prep));
    let rows = match sweep(config) {
        Ok(rows) => {
            checks.extend(sweep_checks(&rows));
            rows
        }
        Err(e) => {
            checks.push(Check::failed("sweep", "sweep", e));
            Vec::new()
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { passed, checks, sweep: rows })
}

const GRID_K: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
const GRID_X: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// `E K' + E' K - K K' - π/2`.
pub fn legendre_residual(k: f64) -> Result<f64> {
    let m = EllipticModulusPair::new(k)?;
    let (kk, e, kp, ep) = (m.complete_k(), m.complete_e(), m.complete_k_prime(), m.complete_e_prime());
    Ok((e * kp + ep * kk - kk * kp - FRAC_PI_2).abs())
}

/// Largest deviation of the binomial series from the quadrature oracle
/// over `k <= 0.5` and `x` in `{0.1, ..., 1}`.
pub fn series_oracle_residual() -> Result<f64> {
    let trunc = SeriesTruncation::new(400, 1e-17)?;
    let mut worst = 0.0f64;
    for &k in GRID_K.iter().filter(|k| **k <= 0.5) {
        for &x in &GRID_X {
            worst = worst.max((elliptic::series_f(x, k, trunc)? - elliptic::quadrature_f(x, k)?).abs());
            worst = worst.max((elliptic::series_e(x, k, trunc)? - elliptic::quadrature_e(x, k)?).abs());
        }
    }
    Ok(worst)
}

/// `|I_0(x) - 2 I_2(x) - x sqrt(1 - x^2)|`, worst over the x grid.
pub fn i02_residual() -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in &GRID_X {
        let r = elliptic::i2n(0, x)? - 2.0 * elliptic::i2n(1, x)? - x * ((1.0 - x) * (1.0 + x)).sqrt();
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Small-modulus limits `K, E -> π/2`, `K' - ln(4/k) -> 0`, `E' -> 1`.
pub fn small_modulus_limit_residual(k: f64) -> Result<f64> {
    let m = EllipticModulusPair::new(k)?;
    Ok([
        m.complete_k() - FRAC_PI_2,
        m.complete_e() - FRAC_PI_2,
        m.complete_k_prime() - (4.0 / k).ln(),
        m.complete_e_prime() - 1.0,
    ]
    .iter()
    .fold(0.0, |a, r| a.max(r.abs())))
}

/// The same limits with the roles of `k` and `k'` exchanged.
pub fn large_modulus_limit_residual(k_prime: f64) -> Result<f64> {
    let m = EllipticModulusPair::from_complement(k_prime)?;
    Ok([
        m.complete_k() - (4.0 / k_prime).ln(),
        m.complete_e() - 1.0,
        m.complete_k_prime() - FRAC_PI_2,
        m.complete_e_prime() - FRAC_PI_2,
    ]
    .iter()
    .fold(0.0, |a, r| a.max(r.abs())))
}

pub fn elliptic_checks() -> Vec<Check> {
    const S: &str = "elliptic";
    let mut out = Vec::new();
    let legendre = GRID_K.iter().map(|&k| legendre_residual(k)).collect::<Result<Vec<_>>>();
    out.push(match legendre {
        Ok(r) => Check::below(S, "legendre relation", r.iter().fold(0.0, |a: f64, b| a.max(*b)), 1e-10),
        Err(e) => Check::failed(S, "legendre relation", e),
    });
    out.push(match series_oracle_residual() {
        Ok(r) => Check::below(S, "series vs quadrature", r, 1e-10),
        Err(e) => Check::failed(S, "series vs quadrature", e),
    });
    out.push(match i02_residual() {
        Ok(r) => Check::below(S, "I0 - 2 I2 identity", r, 1e-14),
        Err(e) => Check::failed(S, "I0 - 2 I2 identity", e),
    });
    for (name, f) in [
        ("small modulus limits", small_modulus_limit_residual as fn(f64) -> Result<f64>),
        ("large modulus limits", large_modulus_limit_residual),
    ] {
        match [1e-2, 1e-4, 1e-6].iter().map(|&k| f(k)).collect::<Result<Vec<_>>>() {
            Ok(r) => {
                out.push(Check::below(S, format!("{name} at 1e-4"), r[1], 1e-3));
                let decreasing = r.windows(2).all(|w| w[1] <= w[0]);
                out.push(Check::flag(S, format!("{name} shrink"), decreasing, format!("{r:?}")));
            }
            Err(e) => out.push(Check::failed(S, name, e)),
        }
    }
    out
}

pub fn canonical_checks(config: &RunConfig, prep: &Prepared) -> Vec<Check> {
    const S: &str = "canonical";
    let e = prep.ends;
    let solved: Result<Vec<_>> =
        config.h_values.iter().map(|&h| canonical::solve(h, e.alpha, e.beta, e.sigma)).collect();
    let params = match solved {
        Ok(p) => p,
        Err(err) => return vec![Check::failed(S, "solve", err)],
    };
    let mut out = Vec::new();
    let increasing = params.windows(2).all(|w| w[1].one_minus_k < w[0].one_minus_k);
    out.push(Check::flag(S, "k increasing in H", increasing, ""));
    // σ = β collapses μ onto λ and r2 onto r1
    let equal_ends = e.sigma == e.beta;
    for p in &params {
        let mu_ok = if equal_ends {
            (p.one_minus_mu - p.one_minus_lambda).abs() <= 1e-12 * p.one_minus_lambda
        } else {
            p.one_minus_lambda > p.one_minus_mu
        };
        let ordered = p.one_minus_k > p.one_minus_lambda && mu_ok && p.one_minus_mu > 0.0;
        out.push(Check::flag(S, format!("k < lambda <= mu < 1 at H = {}", p.h), ordered, ""));
        let (r1, r2) = (p.r1(), p.r2());
        let r_ok = if equal_ends { (r1 - r2).abs() <= 1e-12 * r1 } else { r2 < r1 };
        let ok = r2 > 0.0 && r_ok && r1 < 1.0;
        out.push(Check::flag(S, format!("0 < r2 <= r1 < 1 at H = {}", p.h), ok, format!("r1 {} r2 {}", fmt17(r1), fmt17(r2))));
    }
    out
}

/// Convex quadrilateral with vertices at jittered angles on a perturbed
/// circle.
pub fn random_convex_quad(rng: &mut impl Rng) -> [Complex64; 4] {
    loop {
        let base: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let v: Vec<Complex64> = (0..4)
            .map(|i| {
                let t = base + FRAC_PI_2 * (i as f64 + rng.gen_range(-0.3..0.3));
                Complex64::from_polar(rng.gen_range(0.6..1.4), t)
            })
            .collect();
        let convex = (0..4).all(|i| {
            let (a, b, c) = (v[i], v[(i + 1) % 4], v[(i + 2) % 4]);
            ((b - a).conj() * (c - b)).im > 0.05
        });
        if convex {
            return [v[0], v[1], v[2], v[3]];
        }
    }
}

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

pub fn modulus_checks(config: &RunConfig, prep: &Prepared) -> Vec<Check> {
    const S: &str = "modulus";
    let opts = &config.grid;
    let mut out = Vec::new();
    for m in [0.5, 1.0, 2.0] {
        let name = format!("rectangle m = {m}");
        let v = [c(0., 0.), c(1., 0.), c(1., m), c(0., m)];
        out.push(match MarkedPolygon::new(v.to_vec(), v, Orientation::Interior).and_then(|p| interior_modulus(&p, opts)) {
            Ok(e) => Check::below(S, name, (e.value / m - 1.0).abs(), 0.01),
            Err(e) => Check::failed(S, name, e),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for i in 0..3 {
        let name = format!("conjugate duality, quad {i}");
        let v = random_convex_quad(&mut rng);
        let r = MarkedPolygon::new(v.to_vec(), v, Orientation::Interior).and_then(|p| {
            Ok(interior_modulus(&p, opts)?.value * interior_modulus(&p.conjugate(), opts)?.value)
        });
        out.push(match r {
            Ok(prod) => Check::below(S, name, (prod - 1.0).abs(), 0.02),
            Err(e) => Check::failed(S, name, e),
        });
    }
    let sq = [c(-1., -1.), c(1., -1.), c(1., 1.), c(-1., 1.)];
    out.push(match MarkedPolygon::new(sq.to_vec(), sq, Orientation::Exterior).and_then(|p| exterior_modulus(&p, opts)) {
        Ok(e) => Check::below(S, "exterior square", (e.value - 1.0).abs(), 0.02),
        Err(e) => Check::failed(S, "exterior square", e),
    });

    let unit = [c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.)];
    let narrowed = [c(0.2, 0.), c(0.8, 0.), c(0.8, 1.), c(0.2, 1.)];
    let r = MarkedPolygon::new(unit.to_vec(), unit, Orientation::Interior).and_then(|p| {
        let q = p.with_marks(narrowed)?;
        check_monotonicity_narrowing(&p.walk(), &q.walk(), opts)
    });
    out.push(Check::monotone(S, "narrowing: square", r));

    let h = config.h_values[0];
    let e = prep.ends;
    let config_walk = |kind| -> Result<MarkedWalk> {
        MarkedWalk::from_configuration(&build_configuration(kind, e.alpha, e.beta, e.sigma, Some(prep.m), h)?, 0.0)
    };
    let g1 = stretch(&prep.straightened, h)
        .and_then(|q| MarkedPolygon::from_stretched(&q, config.boundary_samples, Orientation::Exterior))
        .map(|p| p.walk());
    out.push(Check::monotone(
        S,
        format!("narrowing: G2H vs G~2H at H = {h}"),
        config_walk(ConfigKind::G2H).and_then(|a| check_monotonicity_narrowing(&a, &config_walk(ConfigKind::Gtilde2H)?, opts)),
    ));
    out.push(Check::monotone(
        S,
        format!("domain: G2H in G1H at H = {h}"),
        g1.clone().and_then(|g1| check_monotonicity_domain(&g1, &config_walk(ConfigKind::G2H)?, opts)),
    ));
    out.push(Check::monotone(
        S,
        format!("domain: G1H in G3H at H = {h}"),
        g1.and_then(|g1| check_monotonicity_domain(&config_walk(ConfigKind::G3H)?, &g1, opts)),
    ));

    let name = format!("G*3H grid vs analytic at H = {h}");
    let r = canonical::solve(h, e.alpha, e.beta, e.sigma).and_then(|p| {
        let cfg = build_configuration(ConfigKind::Gstar3H, e.alpha, e.beta, e.sigma, None, h)?;
        Ok((canonical::mod_gstar3h(&p), configuration_modulus(&cfg, 0.0, opts)?.value))
    });
    out.push(match r {
        Ok((exact, grid)) => Check::below(S, name, (grid / exact - 1.0).abs(), 0.02),
        Err(err) => Check::failed(S, name, err),
    });
    let name = format!("G*3H width-extrapolated vs analytic at H = {h}");
    let finest = opts.h / (1u64 << (opts.levels - 1)) as f64;
    let eps: Vec<f64> = config.eps_factors.iter().map(|f| f * finest).collect();
    let r = canonical::solve(h, e.alpha, e.beta, e.sigma).and_then(|p| {
        let cfg = build_configuration(ConfigKind::Gstar3H, e.alpha, e.beta, e.sigma, None, h)?;
        Ok((canonical::mod_gstar3h(&p), thickened_configuration_modulus(&cfg, &eps, config.width_extrapolation, opts)?.extrapolated.value))
    });
    out.push(match r {
        Ok((exact, grid)) => Check::below(S, name, (grid / exact - 1.0).abs(), 0.02),
        Err(err) => Check::failed(S, name, err),
    });
    out
}

/// Slack of the convergence-trend checks.
pub const TREND_SLACK: f64 = 0.02;

/// `|r_{i+1} - 1| <= |r_i - 1| + TREND_SLACK` along the sweep.
pub fn trend_holds(ratios: &[f64]) -> bool {
    ratios.windows(2).all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs() + TREND_SLACK)
}

pub fn sweep_checks(rows: &[SweepRow]) -> Vec<Check> {
    const S: &str = "sweep";
    let mut out = Vec::new();
    for r in rows {
        out.push(Check::flag(
            S,
            format!("sandwich at H = {}", r.h),
            r.sandwich_ok,
            format!("{} <= {} <= {}", fmt17(r.lower), fmt17(r.ext_straightened), fmt17(r.upper)),
        ));
        if let (Some(q), Some(ok)) = (r.quasi_ratio, r.quasi_ok) {
            out.push(Check::flag(S, format!("quasi-invariance at H = {}", r.h), ok, format!("ratio {} K_H {}", fmt17(q), fmt17(r.k_h))));
        }
    }
    let column = |f: fn(&SweepRow) -> Option<f64>| -> Option<Vec<f64>> { rows.iter().map(f).collect() };
    for (name, col) in [
        ("lower ratio trend", column(|r| Some(r.ratio_lower))),
        ("upper ratio trend", column(|r| Some(r.ratio_upper))),
        ("straightened ratio trend", column(|r| Some(r.ratio_straightened))),
        ("direct ratio trend", column(|r| r.ratio_direct)),
    ] {
        if let Some(v) = col {
            out.push(Check::flag(S, name, trend_holds(&v), format!("{v:?}")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_suite_passes() {
        for c in elliptic_checks() {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn random_quads_are_reproducible_and_convex() {
        let a = random_convex_quad(&mut ChaCha8Rng::seed_from_u64(7));
        let b = random_convex_quad(&mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert!(MarkedPolygon::new(a.to_vec(), a, Orientation::Interior).is_ok());
    }

    #[test]
    fn trend_slack() {
        assert!(trend_holds(&[2.0, 1.5, 1.51, 1.2]));
        assert!(!trend_holds(&[1.2, 1.5]));
        assert!(trend_holds(&[0.9, 1.1]));
    }
}
