//! Shaped quadrilaterals, stretching, straightening and the comparison
//! configurations built from them.

pub mod config;
pub mod shape;
pub mod straighten;

pub use config::{
    build_configuration, default_rectangle_height, end_parameters, rectangle_height_for, ConfigKind, EndParameters,
    MarkedPoint, MarkedSlitConfiguration, SlitSide,
};
pub use shape::{stretch, Preset, ShapedQuadrilateral, StretchedQuadrilateral, DEFAULT_SAMPLES};
pub use straighten::{
    midcurve_polyline, qc_coefficient, straighten_shape, straightening_apply, Midcurve, PolylineStraightening,
};
