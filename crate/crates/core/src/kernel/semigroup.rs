//! Semigroup action `P_t h` and its aggregate over sampling times.

use crate::error::Result;
use crate::numerics::{integrate, Domain, Quadrature, QuadratureSpec};

use super::density::{transition_density, v_rho};
use super::params::SkewStickyParams;

/// Evaluates `P_t h(x) = rho h(0) p(t,x,0) + ∫ h(y) p(t,x,y) m_(0,beta)(dy)`
/// by quadrature with a declared breakpoint at 0.
///
/// `h_support` optionally restricts the integration range (the dominating
/// Gaussian of the kernel centered at `x` is used for truncation otherwise).
pub fn semigroup_apply<F: Fn(f64) -> f64>(
    params: &SkewStickyParams,
    t: f64,
    h: &F,
    x: f64,
    h_support: Option<(f64, f64)>,
    spec: &QuadratureSpec,
) -> Result<f64> {
    params.require_nonreflecting()?;
    let atom_term = params.rho() * h(0.0) * v_rho(params, t, x, 0.0)?;
    let domain = match h_support {
        Some((lo, hi)) => Domain { lo, hi, center: x, scale: t.sqrt() },
        None => Domain::real_line(x, t.sqrt()),
    };
    let q: Quadrature = integrate(
        |y| h(y) * transition_density(params, t, x, y).unwrap() * params.skew_weight(y),
        domain,
        &[0.0],
        spec,
    )?;
    Ok(atom_term + q.value)
}

/// Aggregate semigroup action over the sampling grid,
/// `gamma_n[h](t, x) = sum_{i=2}^{[nt]} P_{i-1}^{(rho sqrt n, beta)} h(sqrt n x)`.
///
/// The scaled parameter comes from the space-time scaling of the process:
/// `sqrt(n) X_{s/n}` is again skew-sticky with stickiness `rho sqrt(n)`.
pub fn gamma_n<F: Fn(f64) -> f64>(
    params: &SkewStickyParams,
    h: &F,
    n: u64,
    t: f64,
    x: f64,
    h_support: Option<(f64, f64)>,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let scaled = params.space_time_scaled((n as f64).sqrt());
    let terms = (n as f64 * t).floor() as u64;
    let mut sum = 0.0;
    for i in 2..=terms {
        sum += semigroup_apply(&scaled, (i - 1) as f64, h, (n as f64).sqrt() * x, h_support, spec)?;
    }
    Ok(sum)
}
