//! Scalar special functions, quadrature and root finding.
//!
//! Everything here is pure and stateless; no other module owns numerical
//! plumbing of its own.

mod erf;
mod quad;
mod root;

pub use erf::{erf, erfc, normal_cdf, scaled_erfc, K_MILLS};
pub use quad::{integrate, Domain, Quadrature, QuadratureSpec};
pub use root::find_root;
