//! Conditionally consistent estimators of stickiness, skewness and the
//! one-sided volatilities.
//!
//! Every estimate is conditional on the path having actually visited the
//! relevant region before the horizon; an estimate whose conditioning event
//! failed is reported as absent, never as an error.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::sampler::SamplePath;
use crate::stats::{
    occupation_statistic, one_sided_sums, quadratic_variation_sums, Interval, NormalizingSequence,
    TestFunction,
};

/// Raw ingredients behind the estimates, kept for reporting.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub zero_count: u64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub qv_plus: f64,
    pub qv_minus: f64,
    pub occupation_plus: f64,
    pub occupation_minus: f64,
    /// Skewness before clamping to [-1, 1].
    pub beta_raw: Option<f64>,
}

/// Estimation outcome for one path. An estimate is present only when its
/// conditioning event held on the discrete path.
#[derive(Debug, Clone, Default)]
pub struct EstimateReport {
    pub rho_hat: Option<f64>,
    pub beta_hat: Option<f64>,
    pub sigma_plus_hat: Option<f64>,
    pub sigma_minus_hat: Option<f64>,
    pub hit_zero: bool,
    pub hit_positive: bool,
    pub hit_negative: bool,
    pub n: u64,
    pub horizon: f64,
    pub diagnostics: Diagnostics,
}

impl EstimateReport {
    pub const CSV_HEADER: &'static str = "n,t,hit_zero,hit_positive,hit_negative,rho_hat,beta_hat,sigma_plus_hat,sigma_minus_hat,zero_count,s_plus,s_minus,qv_plus,qv_minus,occupation_plus,occupation_minus,beta_raw";

    pub fn write_csv_row<W: Write>(&self, w: &mut W) -> io::Result<()> {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.horizon,
            self.hit_zero,
            self.hit_positive,
            self.hit_negative,
            opt(self.rho_hat),
            opt(self.beta_hat),
            opt(self.sigma_plus_hat),
            opt(self.sigma_minus_hat),
            self.diagnostics.zero_count,
            self.diagnostics.s_plus,
            self.diagnostics.s_minus,
            self.diagnostics.qv_plus,
            self.diagnostics.qv_minus,
            self.diagnostics.occupation_plus,
            self.diagnostics.occupation_minus,
            opt(self.diagnostics.beta_raw),
        )
    }
}

/// Discrete surrogates of the conditioning events. A sign change between
/// consecutive observations implies a zero crossing in continuous time, so it
/// counts as a visit to 0; the continuous-time events are supersets of these.
fn conditioning_flags(path: &SamplePath) -> (bool, bool, bool) {
    let values = path.values();
    let mut hit_zero = false;
    let mut hit_pos = false;
    let mut hit_neg = false;
    let mut prev = values[0];
    if prev == 0.0 {
        hit_zero = true;
    }
    for &v in values {
        if v == 0.0 {
            hit_zero = true;
        } else if v > 0.0 {
            hit_pos = true;
        } else {
            hit_neg = true;
        }
        if v * prev < 0.0 {
            hit_zero = true;
        }
        prev = v;
    }
    (hit_zero, hit_pos, hit_neg)
}

fn zero_count(path: &SamplePath) -> u64 {
    let values = path.values();
    values[..values.len() - 1].iter().filter(|v| **v == 0.0).count() as u64
}

/// Estimates `(rho, beta)` with known one-sided volatilities:
/// `rho_hat = 2 occ({0}) / (S+ + S-)`, `beta_hat = (S+ - S-)/(S+ + S-)`.
/// Requires `g` bounded, integrable, vanishing at 0, with both one-sided
/// integrals nonzero. Reported only on the event that the path visited 0.
pub fn estimate_rho_beta(
    path: &SamplePath,
    g: &TestFunction,
    u: &NormalizingSequence,
    sigma_plus: f64,
    sigma_minus: f64,
) -> Result<EstimateReport> {
    if !g.vanishes_at_zero() {
        return Err(Error::InvalidParameter(
            "rho/beta estimation requires a test function with g(0) = 0".into(),
        ));
    }
    let (hit_zero, hit_positive, hit_negative) = conditioning_flags(path);
    let (sp, sn) = one_sided_sums(path, g, u, sigma_plus, sigma_minus)?;
    let s_plus = sp.terminal();
    let s_minus = sn.terminal();
    let occ_zero = occupation_statistic(path, Interval::singleton(0.0)).terminal();

    let mut report = EstimateReport {
        hit_zero,
        hit_positive,
        hit_negative,
        n: path.n(),
        horizon: path.horizon(),
        diagnostics: Diagnostics {
            zero_count: zero_count(path),
            s_plus,
            s_minus,
            occupation_plus: occupation_statistic(path, Interval::positive_half_line()).terminal(),
            occupation_minus: occupation_statistic(path, Interval::negative_half_line()).terminal(),
            ..Diagnostics::default()
        },
        ..EstimateReport::default()
    };

    let denom = s_plus + s_minus;
    if hit_zero && denom > 0.0 {
        report.rho_hat = Some(2.0 * occ_zero / denom);
        let beta_raw = (s_plus - s_minus) / denom;
        report.diagnostics.beta_raw = Some(beta_raw);
        report.beta_hat = Some(beta_raw.clamp(-1.0, 1.0));
    }
    Ok(report)
}

/// Estimates the one-sided volatilities from squared increments:
/// `sigma+_hat = sqrt(QV+ / occ((0,inf)))`, reported only when the path
/// entered the positive half-line; mirror for the negative side.
pub fn estimate_sigmas(path: &SamplePath) -> EstimateReport {
    let (hit_zero, hit_positive, hit_negative) = conditioning_flags(path);
    let (qp, qm) = quadratic_variation_sums(path);
    let occ_pos = occupation_statistic(path, Interval::positive_half_line()).terminal();
    let occ_neg = occupation_statistic(path, Interval::negative_half_line()).terminal();

    let mut report = EstimateReport {
        hit_zero,
        hit_positive,
        hit_negative,
        n: path.n(),
        horizon: path.horizon(),
        diagnostics: Diagnostics {
            zero_count: zero_count(path),
            qv_plus: qp.terminal(),
            qv_minus: qm.terminal(),
            occupation_plus: occ_pos,
            occupation_minus: occ_neg,
            ..Diagnostics::default()
        },
        ..EstimateReport::default()
    };
    if hit_positive && occ_pos > 0.0 {
        report.sigma_plus_hat = Some((qp.terminal() / occ_pos).sqrt());
    }
    if hit_negative && occ_neg > 0.0 {
        report.sigma_minus_hat = Some((qm.terminal() / occ_neg).sqrt());
    }
    report
}

/// Joint estimation of the full parameter set for an oscillating path:
/// volatilities first from squared increments, then `(rho, beta)` with the
/// estimated volatilities standing in for the true ones. Conditioning
/// failures propagate as absent estimates.
pub fn estimate_full(
    path: &SamplePath,
    g: &TestFunction,
    u: &NormalizingSequence,
) -> Result<EstimateReport> {
    if path.params().beta().abs() >= 1.0 {
        return Err(Error::ReflectionUnsupported);
    }
    let sigmas = estimate_sigmas(path);
    let mut report = sigmas.clone();
    if let (Some(sp), Some(sm)) = (sigmas.sigma_plus_hat, sigmas.sigma_minus_hat) {
        let rb = estimate_rho_beta(path, g, u, sp, sm)?;
        report.rho_hat = rb.rho_hat;
        report.beta_hat = rb.beta_hat;
        report.diagnostics.s_plus = rb.diagnostics.s_plus;
        report.diagnostics.s_minus = rb.diagnostics.s_minus;
        report.diagnostics.beta_raw = rb.diagnostics.beta_raw;
    }
    Ok(report)
}
