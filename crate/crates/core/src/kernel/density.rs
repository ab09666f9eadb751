//! Closed-form transition kernel of the skew-sticky Brownian motion.
//!
//! With respect to its speed measure the transition density factorizes as
//!
//! ```text
//! p(t,x,y) = (u1(t,x,y) - u2(t,x,y)) / a(y) + v_rho(t,x,y)
//! ```
//!
//! where `u1` is the Gaussian kernel, `u2(t,x,y) = u1(t,|x|,-|y|)` and `v_rho`
//! carries the sticky boundary term. For `x*y <= 0` and `rho > 0` the whole
//! kernel collapses to `v_rho`.

use crate::error::{Error, Result};
use crate::numerics::{erf, find_root, normal_cdf, scaled_erfc};

use super::params::SkewStickyParams;

const INV_SQRT_2PI: f64 = 0.3989422804014327;

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::NonpositiveTime(t));
    }
    Ok(())
}

/// Gaussian kernel `(2 pi t)^{-1/2} exp(-(x-y)^2 / 2t)`.
pub fn u1(t: f64, x: f64, y: f64) -> Result<f64> {
    check_time(t)?;
    let d = x - y;
    Ok(INV_SQRT_2PI / t.sqrt() * (-d * d / (2.0 * t)).exp())
}

/// Image kernel `(2 pi t)^{-1/2} exp(-(|x|+|y|)^2 / 2t)`.
pub fn u2(t: f64, x: f64, y: f64) -> Result<f64> {
    check_time(t)?;
    let c = x.abs() + y.abs();
    Ok(INV_SQRT_2PI / t.sqrt() * (-c * c / (2.0 * t)).exp())
}

/// `rho * v_rho` as a function of `c = |x| + |y|`, evaluated in the
/// overflow-free form `exp(-c^2/2t) * scaled_erfc(c/sqrt(2t) + sqrt(2t)/rho)`.
/// The naive closed form contains `exp(2c/rho + 2t/rho^2)`, which explodes for
/// small `rho`; it is never formed here.
fn sticky_factor(rho: f64, t: f64, c: f64) -> f64 {
    let s2t = (2.0 * t).sqrt();
    let z = c / s2t + s2t / rho;
    (-c * c / (2.0 * t)).exp() * scaled_erfc(z)
}

/// Sticky kernel factor `v_rho(t,x,y)`; equals `u2` when `rho = 0` and is
/// continuous in `rho` at 0.
pub fn v_rho(params: &SkewStickyParams, t: f64, x: f64, y: f64) -> Result<f64> {
    check_time(t)?;
    let rho = params.rho();
    if rho == 0.0 {
        return u2(t, x, y);
    }
    Ok(sticky_factor(rho, t, x.abs() + y.abs()) / rho)
}

/// Transition density with respect to the speed measure `m_(rho,beta)`.
pub fn transition_density(params: &SkewStickyParams, t: f64, x: f64, y: f64) -> Result<f64> {
    params.require_nonreflecting()?;
    check_time(t)?;
    let diff = u1(t, x, y)? - u2(t, x, y)?;
    let v = v_rho(params, t, x, y)?;
    Ok(diff / params.skew_weight(y) + v)
}

/// Lebesgue density of the continuous part of the transition law,
/// `p(t,x,y) * a(y)` for the skew-sticky case.
pub fn lebesgue_density(params: &SkewStickyParams, t: f64, x: f64, y: f64) -> Result<f64> {
    params.require_nonreflecting()?;
    check_time(t)?;
    let diff = u1(t, x, y)? - u2(t, x, y)?;
    let v = v_rho(params, t, x, y)?;
    Ok(diff + params.skew_weight(y) * v)
}

/// Probability that the chain sits exactly at the sticky point,
/// `P_x(X_t = 0) = rho * v_rho(t, x, 0)`.
pub fn atom_probability(params: &SkewStickyParams, t: f64, x: f64) -> Result<f64> {
    check_time(t)?;
    if params.rho() == 0.0 {
        return Ok(0.0);
    }
    Ok(sticky_factor(params.rho(), t, x.abs()))
}

/// Integral of `v_rho(t,x,.)` over `c = |x| + |y|` in `[c1, c2]`, in closed
/// form. Obtained by integrating the ODE
/// `d/dc [rho v] = (2/rho)(rho v) - 2 exp(-c^2/2t) / sqrt(2 pi t) * sqrt(pi/2)`,
/// which gives
/// `∫ v dc = (G(c2) - G(c1))/2 + (erf(c2/s) - erf(c1/s))/2`, `s = sqrt(2t)`.
fn v_integral(rho: f64, t: f64, c1: f64, c2: f64) -> f64 {
    debug_assert!(c1 <= c2);
    let s2t = (2.0 * t).sqrt();
    if rho == 0.0 {
        return normal_cdf(c2 / t.sqrt()) - normal_cdf(c1 / t.sqrt());
    }
    let g1 = sticky_factor(rho, t, c1);
    let g2 = if c2.is_finite() { sticky_factor(rho, t, c2) } else { 0.0 };
    let e1 = erf(c1 / s2t);
    let e2 = if c2.is_finite() { erf(c2 / s2t) } else { 1.0 };
    0.5 * (g2 - g1) + 0.5 * (e2 - e1)
}

/// CDF of the killed part `(u1 - u2) 1{sgn y = sgn x}` up to `y`.
fn killed_cdf(t: f64, x: f64, y: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let st = t.sqrt();
    if x > 0.0 {
        if y <= 0.0 {
            return 0.0;
        }
        (normal_cdf((y - x) / st) - normal_cdf(-x / st)) - (normal_cdf((y + x) / st) - normal_cdf(x / st))
    } else {
        let yy = y.min(0.0);
        normal_cdf((yy - x) / st) - normal_cdf((yy + x) / st)
    }
}

/// Transition CDF `P_x(X_t <= y)` including the atom at 0, in closed form.
///
/// Right-continuous with a jump of size `atom_probability` at `y = 0`.
pub fn transition_cdf(params: &SkewStickyParams, t: f64, x: f64, y: f64) -> Result<f64> {
    params.require_nonreflecting()?;
    check_time(t)?;
    let rho = params.rho();
    let beta = params.beta();
    let cx = x.abs();

    let vpart = if y <= 0.0 {
        (1.0 - beta) * v_integral(rho, t, cx + y.abs(), f64::INFINITY)
    } else {
        (1.0 - beta) * v_integral(rho, t, cx, f64::INFINITY) + (1.0 + beta) * v_integral(rho, t, cx, cx + y)
    };
    let atom = if y >= 0.0 { atom_probability(params, t, x)? } else { 0.0 };
    let f = killed_cdf(t, x, y) + vpart + atom;
    Ok(f.clamp(0.0, 1.0))
}

/// Inverse of `transition_cdf` in `u`. Values of `u` that fall inside the
/// atom's jump map to exactly `0.0`; downstream statistics test for the sticky
/// state by exact equality.
pub fn transition_quantile(params: &SkewStickyParams, t: f64, x: f64, u: f64) -> Result<f64> {
    params.require_nonreflecting()?;
    check_time(t)?;
    if !(0.0 < u && u < 1.0) {
        return Err(Error::InvalidParameter(format!("quantile level must be in (0,1), got {u}")));
    }
    let atom = atom_probability(params, t, x)?;
    let below_zero = transition_cdf(params, t, x, 0.0)? - atom;
    if u >= below_zero && u <= below_zero + atom {
        return Ok(0.0);
    }
    let target = if u > below_zero + atom { u - atom } else { u };
    quantile_of_continuous(params, t, x, target, atom)
}

/// Root-finds the continuous part of the CDF at level `target` in
/// `(0, 1 - atom)`.
pub(crate) fn quantile_of_continuous(
    params: &SkewStickyParams,
    t: f64,
    x: f64,
    target: f64,
    atom: f64,
) -> Result<f64> {
    let st = t.sqrt();
    let mut lo = x - 9.0 * st;
    let mut hi = x + 9.0 * st;
    let g = |y: f64| -> f64 {
        // continuous part of the CDF; safe to unwrap, preconditions validated
        let full = transition_cdf(params, t, x, y).unwrap();
        let c = if y >= 0.0 { full - atom } else { full };
        c - target
    };
    let mut k = 0;
    while g(lo) > 0.0 && k < 60 {
        lo -= 8.0 * st;
        k += 1;
    }
    k = 0;
    while g(hi) < 0.0 && k < 60 {
        hi += 8.0 * st;
        k += 1;
    }
    let tol = 1e-13 * st.max(x.abs()).max(1.0);
    let y = find_root(g, lo, hi, tol)?;
    // never return an accidental signed zero from the root finder
    Ok(if y == 0.0 { 0.0 } else { y })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen reference values keep their full printed precision
mod tests {
    use super::*;
    use crate::numerics::{integrate, Domain, QuadratureSpec};

    fn sks(rho: f64, beta: f64) -> SkewStickyParams {
        SkewStickyParams::new(rho, beta).unwrap()
    }

    #[test]
    fn u1_values() {
        assert!((u1(1.0, 0.0, 0.0).unwrap() - 0.3989422804014327).abs() < 1e-15);
        // e^{-2} / sqrt(2 pi) by direct evaluation
        assert!((u1(1.0, -1.0, 1.0).unwrap() - 0.053990966513188052).abs() < 1e-15);
        // Gaussian scaling: u1(4, 0, 2) = u1(1, 0, 1) / 2
        assert!((u1(4.0, 0.0, 2.0).unwrap() - 0.12098536225957167).abs() < 1e-15);
        assert!((u1(4.0, 0.0, 2.0).unwrap() - u1(1.0, 0.0, 1.0).unwrap() / 2.0).abs() < 1e-16);
        assert!(u1(0.0, 0.0, 0.0).is_err());
        assert!(u1(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn u1_symmetric_in_x_y() {
        let pts = [(0.3, -1.2), (2.0, 5.0), (-0.7, -0.1)];
        for (x, y) in pts {
            assert_eq!(u1(0.7, x, y).unwrap(), u1(0.7, y, x).unwrap());
        }
    }

    #[test]
    fn v_rho_values() {
        // rho = 0 reduces to u2
        let p0 = sks(0.0, 0.0);
        assert_eq!(v_rho(&p0, 1.0, 1.0, 1.0).unwrap(), u2(1.0, 1.0, 1.0).unwrap());
        assert!((v_rho(&p0, 1.0, 1.0, 1.0).unwrap() - 0.053990966513188052).abs() < 1e-15);
        // rho = 1 at the origin: e^2 erfc(sqrt 2)
        let p1 = sks(1.0, 0.0);
        assert!((v_rho(&p1, 1.0, 0.0, 0.0).unwrap() - 0.33620400244634121).abs() < 1e-13);
        // rho -> 0 limit
        let tiny = sks(1e-6, 0.0);
        let v = v_rho(&tiny, 1.0, 0.5, 0.5).unwrap();
        let lim = u2(1.0, 0.5, 0.5).unwrap();
        assert!((v - lim).abs() / lim < 1e-4, "{v} vs {lim}");
    }

    #[test]
    fn transition_density_values() {
        // standard BM
        let bm = sks(0.0, 0.0);
        assert!((transition_density(&bm, 1.0, 0.0, 0.0).unwrap() - 0.3989422804014327).abs() < 1e-15);
        // opposite signs: u1 - u2 cancels, result equals u2
        let skew = sks(0.0, 0.5);
        assert!(
            (transition_density(&skew, 1.0, -1.0, 1.0).unwrap() - 0.053990966513188052).abs() < 1e-15
        );
        // for x*y <= 0 and rho > 0 the kernel is exactly v_rho
        let p = sks(1.0, 0.3);
        assert_eq!(
            transition_density(&p, 1.0, -0.5, 0.7).unwrap(),
            v_rho(&p, 1.0, -0.5, 0.7).unwrap()
        );
        // reflection rejected
        assert!(transition_density(&sks(1.0, 1.0), 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn atom_probability_values() {
        assert_eq!(atom_probability(&sks(0.0, 0.3), 5.0, 1.0).unwrap(), 0.0);
        let p = sks(1.0, 0.0);
        assert!((atom_probability(&p, 1.0, 0.0).unwrap() - 0.33620400244634121).abs() < 1e-13);
        // always a probability
        for rho in [0.01, 1.0, 100.0] {
            for t in [1e-4, 1.0, 50.0] {
                for x in [-3.0, 0.0, 0.2] {
                    let a = atom_probability(&sks(rho, 0.4), t, x).unwrap();
                    assert!((0.0..=1.0).contains(&a));
                }
            }
        }
    }

    #[test]
    fn normalization_atom_plus_continuous() {
        let spec = QuadratureSpec::default();
        for (rho, beta) in [(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (10.0, -0.9), (0.1, 0.9)] {
            let p = sks(rho, beta);
            for (t, x) in [(1.0, 0.0), (0.1, -0.7), (10.0, 3.0)] {
                let atom = atom_probability(&p, t, x).unwrap();
                let q = integrate(
                    |y| lebesgue_density(&p, t, x, y).unwrap(),
                    Domain::real_line(x, t.sqrt()),
                    &[0.0],
                    &spec,
                )
                .unwrap();
                assert!(
                    (atom + q.value - 1.0).abs() < 1e-8,
                    "mass {} for rho={rho} beta={beta} t={t} x={x}",
                    atom + q.value
                );
            }
        }
    }

    #[test]
    fn cdf_matches_quadrature_of_density() {
        let spec = QuadratureSpec::strict();
        let cases = [
            (1.0, 0.5, 1.0, -1.0, 0.5),
            (1.0, 0.5, 1.0, -1.0, -0.2),
            (0.5, -0.3, 2.0, 1.5, 0.0),
            (0.0, 0.7, 1.0, 0.3, 0.4),
            (10.0, 0.0, 0.01, 0.05, 0.02),
            (2.0, 0.9, 0.1, -0.3, 0.0),
        ];
        for (rho, beta, t, x, y) in cases {
            let p = sks(rho, beta);
            let closed = transition_cdf(&p, t, x, y).unwrap();
            let lo = x.min(y).min(0.0) - 12.0 * t.sqrt();
            let mut q = integrate(
                |z| lebesgue_density(&p, t, x, z).unwrap(),
                Domain::finite(lo, y),
                &[0.0],
                &spec,
            )
            .unwrap()
            .value;
            if y >= 0.0 {
                q += atom_probability(&p, t, x).unwrap();
            }
            assert!((closed - q).abs() < 1e-9, "rho={rho} beta={beta}: {closed} vs {q}");
        }
    }

    #[test]
    fn cdf_limits_and_jump() {
        let p = sks(1.0, 0.0);
        // y -> infinity
        assert!((transition_cdf(&p, 1.0, 0.3, 40.0).unwrap() - 1.0).abs() < 1e-12);
        // symmetric Gaussian at the origin
        let bm = sks(0.0, 0.0);
        assert!((transition_cdf(&bm, 1.0, 0.0, 0.0).unwrap() - 0.5).abs() < 1e-13);
        // jump at 0 equals the atom probability
        let below = transition_cdf(&p, 1.0, 0.0, -1e-300).unwrap();
        let at = transition_cdf(&p, 1.0, 0.0, 0.0).unwrap();
        assert!((at - below - 0.33620400244634121).abs() < 1e-12);
    }

    #[test]
    fn cdf_nondecreasing() {
        let p = sks(2.0, -0.4);
        let mut prev = 0.0;
        let mut y = -8.0;
        while y <= 8.0 {
            let c = transition_cdf(&p, 0.7, 0.4, y).unwrap();
            assert!(c >= prev - 1e-14);
            prev = c;
            y += 0.05;
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let p = sks(1.0, 0.3);
        for u in [0.01, 0.2, 0.55, 0.8, 0.99] {
            let y = transition_quantile(&p, 1.0, -0.5, u).unwrap();
            if y != 0.0 {
                let back = transition_cdf(&p, 1.0, -0.5, y).unwrap();
                assert!((back - u).abs() < 1e-9, "u={u} y={y} back={back}");
            }
        }
        // levels inside the jump map to exactly 0.0
        let atom = atom_probability(&p, 1.0, -0.5).unwrap();
        let below = transition_cdf(&p, 1.0, -0.5, 0.0).unwrap() - atom;
        let mid = below + 0.5 * atom;
        let y = transition_quantile(&p, 1.0, -0.5, mid).unwrap();
        assert_eq!(y.to_bits(), 0.0_f64.to_bits());
    }

    #[test]
    fn skew_bm_specialization() {
        // rho = 0 kernel equals (u1 - u2)/a(y) + u2 exactly
        let p = sks(0.0, 0.6);
        for (x, y) in [(0.3, 0.9), (-1.0, 0.2), (0.0, -0.5)] {
            let direct = (u1(1.0, x, y).unwrap() - u2(1.0, x, y).unwrap()) / p.skew_weight(y)
                + u2(1.0, x, y).unwrap();
            assert_eq!(transition_density(&p, 1.0, x, y).unwrap(), direct);
        }
    }
}
