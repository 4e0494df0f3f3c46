//! Run configuration and the JSON shape schema.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::{Preset, ShapedQuadrilateral};
use crate::modulus::{GridOptions, WidthExtrapolation};

/// Sample table of a shape: `f(x_i)`, `g(x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleTable {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

/// `{preset | samples, a, b, params}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
}

/// Largest boundary jump allowed between adjacent samples of a table.
pub const DEFAULT_MAX_JUMP: f64 = 0.5;

impl ShapeSpec {
    pub fn preset(name: &str) -> Self {
        ShapeSpec { preset: Some(name.into()), ..Default::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("shape: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn resolve_preset(name: &str, params: &Map<String, Value>) -> Result<Preset> {
        let default = match name {
            "strip" => Preset::Strip,
            "trapezoid" => Preset::trapezoid(),
            "sinusoidal" => Preset::sinusoidal(),
            other => return Err(Error::Input(format!("unknown preset '{other}'"))),
        };
        let mut obj = match serde_json::to_value(default) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("presets serialize to objects"),
        };
        for (k, v) in params {
            if !obj.contains_key(k) || k == "preset" {
                return Err(Error::Input(format!("preset '{name}' has no parameter '{k}'")));
            }
            obj.insert(k.clone(), v.clone());
        }
        serde_json::from_value(Value::Object(obj)).map_err(|e| Error::Input(format!("preset '{name}': {e}")))
    }

    /// Builds the shape.
    pub fn build(&self) -> Result<ShapedQuadrilateral<f64>> {
        match (&self.preset, &self.samples) {
            (Some(name), None) => {
                let p = Self::resolve_preset(name, &self.params)?;
                ShapedQuadrilateral::from_preset(p, self.a.unwrap_or(-1.0), self.b.unwrap_or(1.0))
            }
            (None, Some(t)) => {
                if !self.params.is_empty() {
                    return Err(Error::Input("params apply to presets only".into()));
                }
                let q = ShapedQuadrilateral::from_samples(t.x.clone(), t.f.clone(), t.g.clone(), DEFAULT_MAX_JUMP)?;
                for (name, given, actual) in [("a", self.a, q.a()), ("b", self.b, q.b())] {
                    if let Some(v) = given {
                        if (v - actual).abs() > 1e-12 * (1.0 + v.abs()) {
                            return Err(Error::InvalidShape(format!("{name} = {v} disagrees with the sample table ({actual})")));
                        }
                    }
                }
                Ok(q)
            }
            (Some(_), Some(_)) => Err(Error::Input("shape has both 'preset' and 'samples'".into())),
            (None, None) => Err(Error::Input("shape needs 'preset' or 'samples'".into())),
        }
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        self.preset.clone().unwrap_or_else(|| "samples".into())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

fn default_eps_factors() -> Vec<f64> {
    vec![4.0, 8.0]
}

fn default_samples() -> usize {
    257
}

fn default_segments() -> usize {
    32
}

fn yes() -> bool {
    true
}

/// Everything a sweep needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub shape: ShapeSpec,
    #[serde(rename = "H")]
    pub h_values: Vec<f64>,
    #[serde(default)]
    pub grid: GridOptions,
    /// Slit widths for the thickened configurations, in units of the finest
    /// grid spacing.
    #[serde(default = "default_eps_factors")]
    pub eps_factors: Vec<f64>,
    #[serde(default)]
    pub width_extrapolation: WidthExtrapolation,
    #[serde(default)]
    pub outputs: Outputs,
    /// Seed for the randomized regression geometry.
    #[serde(default)]
    pub seed: u64,
    /// Samples per boundary curve of the polygons handed to the grid engine.
    #[serde(default = "default_samples")]
    pub boundary_samples: usize,
    /// Initial segment count of the separating polyline.
    #[serde(default = "default_segments")]
    pub midcurve_segments: usize,
    /// Also compute `ExtMod(Q_H)` on the unstraightened shape.
    #[serde(default = "yes")]
    pub direct: bool,
}

impl RunConfig {
    pub fn new(shape: ShapeSpec, h_values: Vec<f64>) -> Self {
        RunConfig {
            shape,
            h_values,
            grid: GridOptions::default(),
            eps_factors: default_eps_factors(),
            width_extrapolation: WidthExtrapolation::default(),
            outputs: Outputs::default(),
            seed: 0,
            boundary_samples: default_samples(),
            midcurve_segments: default_segments(),
            direct: true,
        }
    }

    /// Default sweep: the strip at `H = 10, 100, 1000, 10000`.
    pub fn default_sweep() -> Self {
        RunConfig::new(ShapeSpec::preset("strip"), vec![10.0, 100.0, 1e3, 1e4])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| Error::Input(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads a config; relative output paths are resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        let mut c = Self::from_json(&text)?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        for p in [&mut c.outputs.csv, &mut c.outputs.json].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_values.is_empty() {
            return Err(Error::Input("H list is empty".into()));
        }
        if self.h_values.iter().any(|h| !(*h > 1.0 && h.is_finite())) {
            return Err(Error::Input("every H must be finite and > 1".into()));
        }
        if self.h_values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Input("H list must be strictly increasing".into()));
        }
        if self.eps_factors.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Input("slit width factors must be positive".into()));
        }
        if self.boundary_samples < 2 || self.midcurve_segments == 0 {
            return Err(Error::Input("boundary_samples >= 2 and midcurve_segments >= 1 required".into()));
        }
        self.shape.build()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_with_params() {
        let s = ShapeSpec::from_json(r#"{"preset": "trapezoid", "params": {"slope": 0.5}}"#).unwrap();
        let q = s.build().unwrap();
        assert_eq!(q.upper(1.0), 1.5);
        let bad = ShapeSpec::from_json(r#"{"preset": "trapezoid", "params": {"tilt": 0.5}}"#).unwrap();
        assert!(bad.build().unwrap_err().is_input_error());
        assert!(ShapeSpec::from_json(r#"{"preset": "blob"}"#).unwrap().build().is_err());
        assert!(ShapeSpec::from_json(r#"{"preset": "strip", "extra": 1}"#).is_err());
    }

    #[test]
    fn sample_tables() {
        let s = ShapeSpec::from_json(r#"{"samples": {"x": [0, 1, 2], "f": [-1, -1, -1], "g": [1, 1.2, 1]}, "a": 0}"#).unwrap();
        let q = s.build().unwrap();
        assert_eq!((q.a(), q.b()), (0.0, 2.0));
        let s = ShapeSpec::from_json(r#"{"samples": {"x": [0, 1], "f": [-1, -1], "g": [1, 1]}, "b": 3}"#).unwrap();
        assert!(s.build().is_err());
    }

    #[test]
    fn config_validation() {
        let ok = r#"{"shape": {"preset": "strip"}, "H": [10, 100]}"#;
        let c = RunConfig::from_json(ok).unwrap();
        assert_eq!(c.eps_factors, vec![4.0, 8.0]);
        assert_eq!(c.grid, GridOptions::default());
        for bad in [
            r#"{"shape": {"preset": "strip"}, "H": [100, 10]}"#,
            r#"{"shape": {"preset": "strip"}, "H": [1]}"#,
            r#"{"shape": {"preset": "strip"}, "H": []}"#,
            r#"{"shape": {}, "H": [10]}"#,
            r#"{"shape": {"preset": "strip"}, "H": [10], "grid": {"h": "x"}}"#,
            "not json",
        ] {
            assert!(RunConfig::from_json(bad).unwrap_err().is_input_error(), "{bad}");
        }
    }
}
