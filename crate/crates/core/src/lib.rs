//! Projection lengths and Favard lengths of random rotated disk Cantor sets.
//!
//! The crate builds the generation-`n` figure of a degree-`d` disk Cantor set
//! (each disk replaced by `d` internally tangent subdisks of ratio `1/d`,
//! with one random rotation per level), computes its orthogonal projections
//! exactly as finite unions of intervals, and estimates the expected
//! projection lengths `E_k` and Favard lengths by seeded Monte Carlo.
//!
//! The geometric layers ([`fractal`], [`interval`], [`projection`],
//! [`quadrature`]) are generic over the scalar type through [`Real`]; the
//! statistical layers ([`estimators`], [`verification`]) work in `f64`.

pub mod error;
pub mod estimators;
pub mod fractal;
pub mod interval;
pub mod io;
pub mod projection;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod verification;

pub use error::{Error, Result};
pub use estimators::{CurveReport, EstimateRecord, SamplingOptions};
pub use fractal::{Disk, FractalSpec, RotationMode, RotationWord};
pub use interval::{Interval, IntervalSet};
pub use rng::SeedSpec;
pub use scalar::Real;

/// Default cap on the number of intervals held by a single projection set.
pub const DEFAULT_MAX_INTERVALS: usize = 30_000_000;

/// Library version recorded in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Disk64 = Disk<f64>;
pub type Disk32 = Disk<f32>;
pub type Interval64 = Interval<f64>;
pub type IntervalSet64 = IntervalSet<f64>;
pub type IntervalSet32 = IntervalSet<f32>;
pub type RotationWord64 = RotationWord<f64>;
pub type RotationWord32 = RotationWord<f32>;
