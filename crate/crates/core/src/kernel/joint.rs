//! Joint law of position, local time and positive occupation time.
//!
//! The law of `(X_t, L_t, O+_t)` started at `x` splits into a part carried by
//! paths that never reach 0 (zero local time, occupation `t` or 0 depending on
//! the starting sign) and an absolutely continuous part on `{rho l < o < t}`
//! built from two first-passage factors:
//!
//! ```text
//! q(y, l, o) = h(o - rho l, a l + x+ + y+) * h(t - o, (1-a) l + x- + y-)
//! ```
//!
//! with `h(s, z) = |z| / sqrt(2 pi s^3) exp(-z^2 / 2s)` and the local-time
//! split weight `a = (1 + beta) / 2`, as a density against `m(dy) dl do`.
//! Positive occupation counts the (sticky) time at 0, hence the support
//! constraint `o > rho l`.
//!
//! Both conventions were calibrated against independent oracles before being
//! frozen: the `(l, o)`-marginal of `q` must reproduce the kernel factor
//! `v_rho` for every sign combination of `(x, y)`, and the moments at
//! `rho = 0, beta = 0` must match `E|B_1| = sqrt(2/pi)` and the arcsine-law
//! mean occupation 1/2. See the tests below and the integration suite.

use crate::error::{Error, Result};

use super::params::SkewStickyParams;

/// One point of the joint law `(X_t, L^0_t, O^+_t)` for a path started at
/// `start` and observed at `horizon`.
#[derive(Debug, Clone, Copy)]
pub struct JointLawPoint {
    /// Terminal position `y`.
    pub position: f64,
    /// Local time at 0, `l >= 0`.
    pub local_time: f64,
    /// Occupation time of `[0, inf)`, in `[0, horizon]`.
    pub occupation: f64,
    /// Time horizon `t > 0`.
    pub horizon: f64,
    /// Starting point `x`.
    pub start: f64,
}

/// First-passage density `h(s, z) = |z|/sqrt(2 pi s^3) * exp(-z^2/2s)`.
fn first_passage(s: f64, z: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let z = z.abs();
    z / (2.0 * std::f64::consts::PI * s * s * s).sqrt() * (-z * z / (2.0 * s)).exp()
}

/// Density of the absolutely continuous part of the joint law with respect to
/// `m(dy) dl do`. Points outside the support `{l > 0, rho l < o < t}` yield 0.
pub fn joint_density(params: &SkewStickyParams, point: &JointLawPoint) -> Result<f64> {
    params.require_nonreflecting()?;
    let JointLawPoint { position: y, local_time: l, occupation: o, horizon: t, start: x } = *point;
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonpositiveTime(t));
    }
    let rho = params.rho();
    if l <= 0.0 || o <= rho * l || o >= t {
        return Ok(0.0);
    }
    let a = 0.5 * (1.0 + params.beta());
    let xp = x.max(0.0);
    let xm = (-x).max(0.0);
    let yp = y.max(0.0);
    let ym = (-y).max(0.0);
    Ok(first_passage(o - rho * l, a * l + xp + yp) * first_passage(t - o, (1.0 - a) * l + xm + ym))
}

/// Density (against `dy`) of the singular part carried by paths that never
/// reach 0: the reflection-principle killed kernel `u1 - u2`, supported on
/// `sgn y = sgn x`, with `(l, o) = (0, t)` for `x > 0` and `(0, 0)` for
/// `x < 0`.
pub fn joint_killed_density(params: &SkewStickyParams, t: f64, x: f64, y: f64) -> Result<f64> {
    params.require_nonreflecting()?;
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonpositiveTime(t));
    }
    if x == 0.0 || x.signum() != y.signum() || y == 0.0 {
        return Ok(0.0);
    }
    let d = super::density::u1(t, x, y)? - super::density::u2(t, x, y)?;
    Ok(d.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::density::v_rho;
    use crate::numerics::{integrate, Domain, QuadratureSpec};

    fn sks(rho: f64, beta: f64) -> SkewStickyParams {
        SkewStickyParams::new(rho, beta).unwrap()
    }

    /// Integrates the joint density over (l, o) at fixed terminal value.
    fn marginal_lo(params: &SkewStickyParams, t: f64, x: f64, y: f64) -> f64 {
        let spec = QuadratureSpec { abs_tol: 1e-11, rel_tol: 1e-10, ..QuadratureSpec::default() };
        let rho = params.rho();
        let l_max = if rho > 0.0 { t / rho } else { 40.0 * t.sqrt() };
        let outer = |l: f64| -> f64 {
            if l <= 0.0 || rho * l >= t {
                return 0.0;
            }
            let inner = integrate(
                |o| {
                    joint_density(
                        params,
                        &JointLawPoint { position: y, local_time: l, occupation: o, horizon: t, start: x },
                    )
                    .unwrap()
                },
                Domain::finite(rho * l, t),
                &[],
                &spec,
            );
            inner.map(|q| q.value).unwrap_or(0.0)
        };
        integrate(outer, Domain::finite(0.0, l_max), &[], &spec).unwrap().value
    }

    #[test]
    fn lo_marginal_recovers_sticky_factor() {
        // The (l,o)-marginal of the a.c. part must equal v_rho(t,x,y) for every
        // sign combination; this is what pins down the split weight and the
        // sign convention in the second first-passage factor.
        let cases = [
            (1.0, 0.0, 1.0, 0.5, 0.7),
            (1.0, 0.5, 1.0, -0.5, 0.7),
            (1.0, 0.5, 1.0, 0.5, -0.7),
            (0.5, 0.3, 2.0, 0.0, 1.0),
            (0.5, -0.6, 0.7, -0.4, -0.1),
        ];
        for (rho, beta, t, x, y) in cases {
            let p = sks(rho, beta);
            let got = marginal_lo(&p, t, x, y);
            let want = v_rho(&p, t, x, y).unwrap();
            assert!(
                (got - want).abs() < 2e-6,
                "rho={rho} beta={beta} x={x} y={y}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn total_mass_is_one() {
        let spec = QuadratureSpec { abs_tol: 1e-9, rel_tol: 1e-9, ..QuadratureSpec::default() };
        for (rho, beta, t, x) in [(1.0, 0.0, 1.0_f64, 0.0), (0.5, 0.4, 1.0, -0.6)] {
            let p = sks(rho, beta);
            // continuous-in-y part: integrate the (l,o)-marginal against m(dy)
            let cont = integrate(
                |y| marginal_lo(&p, t, x, y) * p.skew_weight(y),
                Domain::real_line(x, t.sqrt()),
                &[0.0],
                &spec,
            )
            .unwrap()
            .value;
            let atom = rho * marginal_lo(&p, t, x, 0.0);
            let killed = integrate(
                |y| joint_killed_density(&p, t, x, y).unwrap(),
                Domain::real_line(x, t.sqrt()),
                &[0.0],
                &spec,
            )
            .unwrap()
            .value;
            let mass = cont + atom + killed;
            assert!((mass - 1.0).abs() < 1e-6, "mass = {mass} for rho={rho} beta={beta} x={x}");
        }
    }

    #[test]
    fn out_of_support_is_zero_not_error() {
        let p = sks(1.0, 0.0);
        let base = JointLawPoint { position: 0.3, local_time: 0.5, occupation: 0.7, horizon: 1.0, start: 0.0 };
        // o < rho*l
        let below = JointLawPoint { occupation: 0.4, ..base };
        assert_eq!(joint_density(&p, &below).unwrap(), 0.0);
        // o > t
        let above = JointLawPoint { occupation: 1.5, ..base };
        assert_eq!(joint_density(&p, &above).unwrap(), 0.0);
        // l = 0 belongs to the singular part
        let zero_l = JointLawPoint { local_time: 0.0, ..base };
        assert_eq!(joint_density(&p, &zero_l).unwrap(), 0.0);
        // interior point is positive
        assert!(joint_density(&p, &base).unwrap() > 0.0);
    }

    #[test]
    fn killed_part_only_on_matching_signs() {
        let p = sks(1.0, 0.3);
        assert_eq!(joint_killed_density(&p, 1.0, 0.5, -0.5).unwrap(), 0.0);
        assert_eq!(joint_killed_density(&p, 1.0, 0.0, 0.5).unwrap(), 0.0);
        assert!(joint_killed_density(&p, 1.0, 0.5, 0.8).unwrap() > 0.0);
    }
}
