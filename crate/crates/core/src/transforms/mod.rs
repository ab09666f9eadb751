//! Space transforms connecting the oscillating family to its skew-sticky base
//! process, the induced parameter map, and the local-time conversion factor.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::kernel::{atom_probability, transition_cdf, SkewStickyParams, SosBmParams};
use crate::numerics::{integrate, Domain, QuadratureSpec};
use crate::sampler::{simulate_sos_path, RngStream};
use crate::stats::{ks_statistic_mixed, ks_threshold};

/// Piecewise-linear space map `T1(x) = x / sigma_0(x)`: sign-preserving,
/// bijective, fixes 0.
pub fn t1(params: &SosBmParams, x: f64) -> f64 {
    x / params.sigma0(x)
}

/// Inverse of `t1`.
pub fn t1_inverse(params: &SosBmParams, y: f64) -> f64 {
    y * params.sigma0(y)
}

/// Lamperti-type map `T2(x) = ∫_0^x sigma_0(y) / sigma(y) dy` for a general
/// diffusion coefficient with one-sided limits `sigma0_minus`, `sigma0_plus`
/// at 0. Strictly increasing with unit one-sided slopes at 0.
///
/// `sigma` must stay strictly positive on the integration range.
pub fn t2<F: Fn(f64) -> f64>(
    sigma: &F,
    sigma0_minus: f64,
    sigma0_plus: f64,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if sigma0_minus.is_nan() || sigma0_minus <= 0.0 || sigma0_plus.is_nan() || sigma0_plus <= 0.0 {
        return Err(Error::NonEllipticSigma);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let integrand = |y: f64| {
        let s0 = if y > 0.0 { sigma0_plus } else { sigma0_minus };
        s0 / sigma(y)
    };
    // reject a sign change / zero of sigma on a coarse sweep of the range
    let steps = 64;
    for k in 0..=steps {
        let y = x * k as f64 / steps as f64;
        let s = sigma(y);
        if s.is_nan() || s <= 0.0 {
            return Err(Error::NonEllipticSigma);
        }
    }
    let (lo, hi) = if x > 0.0 { (0.0, x) } else { (x, 0.0) };
    let q = integrate(integrand, Domain::finite(lo, hi), &[0.0], spec)?;
    Ok(if x > 0.0 { q.value } else { -q.value })
}

/// The parameter map induced by `T1` together with the local-time conversion
/// factor between the source and target processes.
#[derive(Debug, Clone, Copy)]
pub struct ParamMap {
    pub source: SosBmParams,
    pub target: SkewStickyParams,
    /// `L^0(T1(X)) = local_time_factor * L^0(X)`.
    pub local_time_factor: f64,
}

/// Maps oscillating parameters to the skew-sticky parameters of `T1(X)`:
///
/// ```text
/// rho' = rho * 2 s- s+ / D,   beta' = (s-(1+beta) - s+(1-beta)) / D,
/// D = s-(1+beta) + s+(1-beta)
/// ```
///
/// with local-time factor `D / (2 s- s+)`, so stickiness is conserved in the
/// sense that `rho' * factor = rho` (the time spent at 0 is invariant under a
/// bijection fixing 0).
pub fn map_params(source: &SosBmParams) -> Result<ParamMap> {
    let sm = source.sigma_minus();
    let sp = source.sigma_plus();
    let beta = source.beta();
    let d = sm * (1.0 + beta) + sp * (1.0 - beta);
    let rho1 = source.rho() * 2.0 * sm * sp / d;
    let beta1 = (sm * (1.0 + beta) - sp * (1.0 - beta)) / d;
    Ok(ParamMap {
        source: *source,
        target: SkewStickyParams::new(rho1, beta1)?,
        local_time_factor: d / (2.0 * sm * sp),
    })
}

/// Recovers the oscillating parameters from the mapped skew-sticky pair and
/// the volatilities (the inverse of `map_params`).
pub fn unmap_params(target: &SkewStickyParams, sigma_minus: f64, sigma_plus: f64) -> Result<SosBmParams> {
    let b1 = target.beta();
    if b1.abs() >= 1.0 {
        return Err(Error::ReflectionUnsupported);
    }
    // beta' determines the odds ratio r = (1+beta)/(1-beta)
    let r = (sigma_plus / sigma_minus) * (1.0 + b1) / (1.0 - b1);
    let beta = (r - 1.0) / (r + 1.0);
    let d = sigma_minus * (1.0 + beta) + sigma_plus * (1.0 - beta);
    let rho = target.rho() * d / (2.0 * sigma_minus * sigma_plus);
    SosBmParams::new(rho, beta, sigma_minus, sigma_plus)
}

/// Local-time mapping factor of a piecewise-C1 invertible `f` with `f(0) = 0`:
/// `L^0(f(X)) = ((d+ - d-) beta + (d+ + d-)) / 2 * L^0(X)`, with the one-sided
/// derivatives supplied by the caller (finite differences across the kink
/// would be wrong; the kink is the whole point).
pub fn local_time_factor(d_plus: f64, d_minus: f64, beta: f64) -> Result<f64> {
    if !d_plus.is_finite() || !d_minus.is_finite() || d_plus <= 0.0 || d_minus <= 0.0 {
        return Err(Error::NonInvertibleTransform);
    }
    Ok(0.5 * ((d_plus - d_minus) * beta + (d_plus + d_minus)))
}

/// One row of the reduction audit.
#[derive(Debug, Clone)]
pub struct ReductionRow {
    pub config: String,
    pub ks_statistic: f64,
    pub ks_threshold: f64,
    /// Zero sets of the source and transformed paths agree pointwise.
    pub zeros_preserved: bool,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub rows: Vec<ReductionRow>,
    pub pass: bool,
}

impl ReductionReport {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "config,ks_statistic,ks_threshold,zeros_preserved,pass")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.config, r.ks_statistic, r.ks_threshold, r.zeros_preserved, r.pass
            )?;
        }
        Ok(())
    }
}

/// Simulates oscillating paths, maps them through `T1` and KS-tests the
/// time-1 marginal against the kernel CDF of the mapped parameters; also
/// checks that `T1` fixes the sticky state pointwise.
pub fn verify_reduction(
    source: &SosBmParams,
    x: f64,
    steps_per_unit: u64,
    n_paths: usize,
    seed: u64,
    alpha: f64,
) -> Result<ReductionReport> {
    let map = map_params(source)?;
    map.target.require_nonreflecting()?;
    let y0 = t1(source, x);

    let mut endpoints = Vec::with_capacity(n_paths);
    let mut zeros_preserved = true;
    for k in 0..n_paths {
        let path = simulate_sos_path(source, x, steps_per_unit, 1.0, RngStream::new(seed, k as u64))?;
        let mapped_terminal = t1(source, path.terminal());
        for &v in path.values() {
            // T1 fixes 0 exactly in both directions
            if (v == 0.0) != (t1(source, v) == 0.0) {
                zeros_preserved = false;
            }
        }
        endpoints.push(mapped_terminal);
    }

    let atom = atom_probability(&map.target, 1.0, y0)?;
    let cdf = |y: f64| transition_cdf(&map.target, 1.0, y0, y).unwrap();
    let cdf_left = |y: f64| cdf(y) - if y == 0.0 { atom } else { 0.0 };
    let d = ks_statistic_mixed(&mut endpoints, &cdf, &cdf_left);
    let threshold = ks_threshold(n_paths, alpha);
    let pass = d < threshold && zeros_preserved;
    let row = ReductionRow {
        config: format!(
            "rho={};beta={};sigma_minus={};sigma_plus={};x={}",
            source.rho(),
            source.beta(),
            source.sigma_minus(),
            source.sigma_plus(),
            x
        ),
        ks_statistic: d,
        ks_threshold: threshold,
        zeros_preserved,
        pass,
    };
    Ok(ReductionReport { pass, rows: vec![row] })
}
