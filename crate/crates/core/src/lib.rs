//! Numerical laboratory for conformal moduli of stretched quadrilaterals.

pub mod canonical;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod modulus;
pub mod quadrature;
pub mod roots;
pub mod scalar;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use scalar::Real;

/// Modulus pair in double precision.
pub type ModulusPair = elliptic::EllipticModulusPair<f64>;
/// Slit-map parameters in double precision.
pub type SlitParameters = canonical::SlitParameters<f64>;
/// Shaped quadrilateral in double precision.
pub type ShapedQuadrilateral = geometry::ShapedQuadrilateral<f64>;
/// Stretched quadrilateral in double precision.
pub type StretchedQuadrilateral = geometry::StretchedQuadrilateral<f64>;
/// Comparison configuration in double precision.
pub type SlitConfiguration = geometry::MarkedSlitConfiguration<f64>;

pub use harness::{RunConfig, ShapeSpec, SweepRow, VerifyReport};
pub use modulus::{GridOptions, MarkedPolygon, ModulusEstimate, Orientation};
