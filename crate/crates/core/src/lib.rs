//! Simulation and inference laboratory for Brownian motions with a
//! skew-oscillating-sticky threshold at the origin.
//!
//! The crate provides, in order of dependence:
//!
//! - [`numerics`]: special functions (`erfc`, its scaled variant), adaptive
//!   quadrature with declared breakpoints, and bracketed root finding;
//! - [`kernel`]: the closed-form transition density of the skew-sticky
//!   Brownian motion with respect to its speed measure, its CDF/quantile,
//!   semigroup action, the joint law of position/local time/occupation, and
//!   numerical audits of the kernel bounds and scaling identities;
//! - [`sampler`]: exact-in-law path simulation on the uniform grid with
//!   reproducible per-path RNG streams;
//! - [`stats`]: the high-frequency statistics (local-time, occupation,
//!   one-sided and quadratic-variation sums, mean-absolute-displacement);
//! - [`estimators`]: conditionally consistent estimators of stickiness,
//!   skewness and the one-sided volatilities;
//! - [`transforms`]: the space transforms connecting the oscillating family
//!   to the skew-sticky base process.
//!
//! Sticky states are represented by bit-exact `0.0` everywhere: samplers emit
//! exact zeros with the atom probability and all statistics test `x == 0.0`.

pub mod error;
pub mod estimators;
pub mod kernel;
pub mod numerics;
pub mod sampler;
pub mod stats;
pub mod transforms;

pub use error::{Error, Result};
pub use kernel::{JointLawPoint, SkewStickyParams, SosBmParams, SpeedMeasure};
pub use sampler::{RngStream, SamplePath};
