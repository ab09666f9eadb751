#![allow(clippy::excessive_precision)] // node and weight tables keep their full printed precision

//! Adaptive Gauss-Kronrod quadrature with declared breakpoints.
//!
//! Speed measures have a density discontinuity at the sticky point, so every
//! caller integrating against one must pass 0 as a breakpoint; the adaptive
//! rule never straddles a declared breakpoint and therefore keeps its order.
//! Improper integrals are truncated at a caller-visible radius measured in
//! standard deviations of the dominating Gaussian.

use crate::error::{Error, Result};

/// Tolerances and budget for one integration call.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the total error estimate.
    pub abs_tol: f64,
    /// Relative tolerance against the accumulated value.
    pub rel_tol: f64,
    /// Maximum number of interval subdivisions before giving up.
    pub max_subdivisions: usize,
    /// Truncation radius for unbounded domains, in units of the dominating
    /// Gaussian's standard deviation.
    pub truncation_sds: f64,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize, truncation_sds: f64) -> Result<Self> {
        if abs_tol.is_nan() || abs_tol <= 0.0 || rel_tol.is_nan() || rel_tol <= 0.0 {
            return Err(Error::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        if max_subdivisions < 16 {
            return Err(Error::InvalidParameter("max_subdivisions must be at least 16".into()));
        }
        if truncation_sds.is_nan() || truncation_sds <= 0.0 {
            return Err(Error::InvalidParameter("truncation radius must be positive".into()));
        }
        Ok(Self { abs_tol, rel_tol, max_subdivisions, truncation_sds })
    }

    /// Tight default used by the verification ops.
    pub fn strict() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-11, max_subdivisions: 400, truncation_sds: 12.0 }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-9, max_subdivisions: 200, truncation_sds: 12.0 }
    }
}

/// Integration domain; `lo`/`hi` may be infinite. Unbounded ends are truncated
/// at `center ± truncation_sds * scale`.
#[derive(Debug, Clone, Copy)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    /// Center of the dominating Gaussian (used only for truncation).
    pub center: f64,
    /// Standard deviation of the dominating Gaussian.
    pub scale: f64,
}

impl Domain {
    pub fn finite(lo: f64, hi: f64) -> Self {
        Self { lo, hi, center: 0.5 * (lo + hi), scale: 1.0 }
    }

    pub fn real_line(center: f64, scale: f64) -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY, center, scale }
    }

    pub fn half_line_above(lo: f64, center: f64, scale: f64) -> Self {
        Self { lo, hi: f64::INFINITY, center, scale }
    }

    pub fn half_line_below(hi: f64, center: f64, scale: f64) -> Self {
        Self { lo: f64::NEG_INFINITY, hi, center, scale }
    }

    fn truncated(&self, spec: &QuadratureSpec) -> (f64, f64) {
        let r = spec.truncation_sds * self.scale;
        let lo = if self.lo.is_finite() { self.lo } else { self.center - r };
        let hi = if self.hi.is_finite() { self.hi } else { self.center + r };
        (lo, hi)
    }
}

/// Value and error estimate of a converged integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
}

// 21-point Gauss-Kronrod pair (10-point Gauss embedded), QUADPACK abscissae.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);

    let mut res_gauss = 0.0;
    let mut res_kronrod = fc * WGK[10];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0_f64; 10];
    let mut fv2 = [0.0_f64; 10];

    for (j, wg) in WG.iter().enumerate() {
        let jtw = 2 * j + 1;
        let abscissa = half * XGK[jtw];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += wg * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtw = 2 * j;
        let abscissa = half * XGK[jtw];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let raw_err = ((res_kronrod - res_gauss) * half).abs();
    let value = res_kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();

    // QUADPACK error rescaling
    let mut err = raw_err;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrate `f` over `domain`, never letting a panel straddle one of the
/// declared `breakpoints`. Deterministic: the subdivision order depends only
/// on the inputs.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    domain: Domain,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let (lo, hi) = domain.truncated(spec);
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidParameter(format!("bad integration range [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(Quadrature { value: 0.0, abs_error: 0.0 });
    }

    let mut edges: Vec<f64> = vec![lo, hi];
    for &b in breakpoints {
        if b > lo && b < hi {
            edges.push(b);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();

    let mut segments: Vec<Segment> = Vec::with_capacity(edges.len() + 16);
    for w in edges.windows(2) {
        let (value, error) = gk21(&f, w[0], w[1]);
        segments.push(Segment { lo: w[0], hi: w[1], value, error });
    }

    let mut splits = 0usize;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(Quadrature { value: total, abs_error: total_err });
        }
        if splits >= spec.max_subdivisions {
            return Err(Error::QuadratureNonConvergent { value: total, error: total_err });
        }
        // split the segment with the largest error estimate
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // interval at floating-point resolution; accept what we have
            segments.push(seg);
            let total: f64 = segments.iter().map(|s| s.value).sum();
            let total_err: f64 = segments.iter().map(|s| s.error).sum();
            return Ok(Quadrature { value: total, abs_error: total_err });
        }
        let (v1, e1) = gk21(&f, seg.lo, mid);
        let (v2, e2) = gk21(&f, mid, seg.hi);
        segments.push(Segment { lo: seg.lo, hi: mid, value: v1, error: e1 });
        segments.push(Segment { lo: mid, hi: seg.hi, value: v2, error: e2 });
        splits += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::erf::normal_cdf;

    const INV_SQRT_2PI: f64 = 0.3989422804014327;

    fn gauss(y: f64) -> f64 {
        INV_SQRT_2PI * (-0.5 * y * y).exp()
    }

    #[test]
    fn gaussian_normalizes() {
        let spec = QuadratureSpec::default();
        let q = integrate(gauss, Domain::real_line(0.0, 1.0), &[], &spec).unwrap();
        assert!((q.value - 1.0).abs() <= 1e-10, "{}", q.value);
    }

    #[test]
    fn half_gaussian() {
        // u1(1, 0, .) over [0, inf) = 1/2 by symmetry
        let spec = QuadratureSpec::default();
        let q = integrate(gauss, Domain::half_line_above(0.0, 0.0, 1.0), &[], &spec).unwrap();
        assert!((q.value - 0.5).abs() <= 1e-10);
    }

    #[test]
    fn breakpoint_keeps_order_across_kink() {
        let spec = QuadratureSpec::default();
        let f = |y: f64| if y <= 0.0 { 0.5 * gauss(y) } else { 1.5 * gauss(y) };
        let q = integrate(f, Domain::real_line(0.0, 1.0), &[0.0], &spec).unwrap();
        assert!((q.value - 1.0).abs() <= 1e-10, "{}", q.value);
    }

    #[test]
    fn linearity_on_polynomial_gaussians() {
        let spec = QuadratureSpec::default();
        let dom = Domain::real_line(0.0, 1.0);
        let combos = [(2.0, -3.0), (0.5, 0.25), (-1.0, 7.0)];
        for (a, b) in combos {
            let fa = |y: f64| y * y * gauss(y);
            let fb = |y: f64| (1.0 + y.powi(4)) * gauss(y);
            let qa = integrate(fa, dom, &[], &spec).unwrap();
            let qb = integrate(fb, dom, &[], &spec).unwrap();
            let qc = integrate(|y| a * fa(y) + b * fb(y), dom, &[], &spec).unwrap();
            let want = a * qa.value + b * qb.value;
            let budget = qa.abs_error.abs() * a.abs() + qb.abs_error * b.abs() + qc.abs_error + 1e-12;
            assert!((qc.value - want).abs() <= budget);
        }
    }

    #[test]
    fn truncation_radius_is_caller_visible() {
        // radius 2 SD deliberately clips the Gaussian mass
        let spec = QuadratureSpec { truncation_sds: 2.0, ..QuadratureSpec::default() };
        let q = integrate(gauss, Domain::real_line(0.0, 1.0), &[], &spec).unwrap();
        let clipped = normal_cdf(2.0) - normal_cdf(-2.0);
        assert!((q.value - clipped).abs() <= 1e-10);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let spec = QuadratureSpec { max_subdivisions: 16, abs_tol: 1e-14, rel_tol: 1e-14, ..QuadratureSpec::default() };
        // integrable singularity at 0 that GK cannot resolve in 16 splits
        let res = integrate(|y: f64| y.abs().powf(-0.9), Domain::finite(1e-12, 1.0), &[], &spec);
        assert!(matches!(res, Err(Error::QuadratureNonConvergent { .. })));
    }

    #[test]
    fn deterministic() {
        let spec = QuadratureSpec::default();
        let f = |y: f64| (y.sin() + 1.1) * gauss(y);
        let a = integrate(f, Domain::real_line(0.0, 1.0), &[0.3], &spec).unwrap();
        let b = integrate(f, Domain::real_line(0.0, 1.0), &[0.3], &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
