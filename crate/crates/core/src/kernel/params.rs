//! Process parameters and speed measures.

use crate::error::{Error, Result};
use crate::numerics::{integrate, Domain, Quadrature, QuadratureSpec};

/// Sign convention used throughout: `sgn(0) = 0`, so the skew weight satisfies
/// `a(0) = 1` (symmetric-local-time convention).
pub fn sgn(y: f64) -> f64 {
    if y > 0.0 {
        1.0
    } else if y < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Parameters of a skew-sticky Brownian motion: stickiness `rho >= 0`
/// (time units per local-time unit) and skewness `beta` in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewStickyParams {
    rho: f64,
    beta: f64,
}

impl SkewStickyParams {
    pub fn new(rho: f64, beta: f64) -> Result<Self> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::InvalidParameter(format!("rho must be finite and >= 0, got {rho}")));
        }
        if !beta.is_finite() || beta.abs() > 1.0 {
            return Err(Error::InvalidParameter(format!("beta must lie in [-1, 1], got {beta}")));
        }
        Ok(Self { rho, beta })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Skew weight `a(y) = 1 + sgn(y) * beta`.
    pub fn skew_weight(&self, y: f64) -> f64 {
        1.0 + sgn(y) * self.beta
    }

    /// The closed-form kernel requires a non-reflecting threshold.
    pub fn require_nonreflecting(&self) -> Result<()> {
        if self.beta.abs() >= 1.0 {
            Err(Error::ReflectionUnsupported)
        } else {
            Ok(())
        }
    }

    /// Parameters of `sqrt(n) * X_{t/n}`, which is again skew-sticky
    /// (stickiness scales by `sqrt(n)`, skewness is scale-invariant).
    pub fn space_time_scaled(&self, sqrt_n: f64) -> Self {
        Self { rho: self.rho * sqrt_n, beta: self.beta }
    }
}

/// Parameters of a skew-oscillating-sticky Brownian motion. The skew-sticky
/// case is `sigma_minus = sigma_plus = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SosBmParams {
    rho: f64,
    beta: f64,
    sigma_minus: f64,
    sigma_plus: f64,
}

impl SosBmParams {
    pub fn new(rho: f64, beta: f64, sigma_minus: f64, sigma_plus: f64) -> Result<Self> {
        SkewStickyParams::new(rho, beta)?;
        for (name, s) in [("sigma_minus", sigma_minus), ("sigma_plus", sigma_plus)] {
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {s}")));
            }
        }
        Ok(Self { rho, beta, sigma_minus, sigma_plus })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma_minus(&self) -> f64 {
        self.sigma_minus
    }

    pub fn sigma_plus(&self) -> f64 {
        self.sigma_plus
    }

    /// Piecewise-constant volatility `sigma_0(y)`, left-continuous at 0.
    pub fn sigma0(&self, y: f64) -> f64 {
        if y > 0.0 {
            self.sigma_plus
        } else {
            self.sigma_minus
        }
    }

    pub fn skew_weight(&self, y: f64) -> f64 {
        1.0 + sgn(y) * self.beta
    }

    pub fn is_skew_sticky(&self) -> bool {
        self.sigma_minus == 1.0 && self.sigma_plus == 1.0
    }

    /// The skew-sticky view when both volatilities are 1.
    pub fn as_skew_sticky(&self) -> Option<SkewStickyParams> {
        if self.is_skew_sticky() {
            Some(SkewStickyParams { rho: self.rho, beta: self.beta })
        } else {
            None
        }
    }
}

impl From<SkewStickyParams> for SosBmParams {
    fn from(p: SkewStickyParams) -> Self {
        Self { rho: p.rho, beta: p.beta, sigma_minus: 1.0, sigma_plus: 1.0 }
    }
}

/// Speed measure `m(dy) = a(y)/sigma_0(y)^2 dy + rho * delta_0(dy)`:
/// an absolutely continuous density with a kink at 0 plus a weighted atom.
/// All kernel and statistic formulas integrate against it.
#[derive(Debug, Clone, Copy)]
pub struct SpeedMeasure {
    params: SosBmParams,
}

impl SpeedMeasure {
    pub fn new(params: SosBmParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &SosBmParams {
        &self.params
    }

    /// Density of the absolutely continuous part at `y`.
    pub fn density(&self, y: f64) -> f64 {
        let s = self.params.sigma0(y);
        self.params.skew_weight(y) / (s * s)
    }

    /// Weight of the atom at 0, `m({0}) = rho`.
    pub fn atom(&self) -> f64 {
        self.params.rho
    }

    /// Signed integral `m(h)` including the atom term `rho * h(0)`.
    pub fn integral<F: Fn(f64) -> f64>(&self, h: F, domain: Domain, spec: &QuadratureSpec) -> Result<Quadrature> {
        let q = integrate(|y| h(y) * self.density(y), domain, &[0.0], spec)?;
        Ok(Quadrature { value: q.value + self.atom() * h(0.0), abs_error: q.abs_error })
    }

    /// Absolute moment `m^(gamma)(h) = ∫ |y|^gamma |h(y)| m(dy)`. The atom
    /// contributes `rho * |h(0)|` for `gamma = 0` and nothing otherwise.
    pub fn abs_moment<F: Fn(f64) -> f64>(
        &self,
        gamma: f64,
        h: F,
        domain: Domain,
        spec: &QuadratureSpec,
    ) -> Result<Quadrature> {
        if gamma < 0.0 {
            return Err(Error::InvalidParameter(format!("moment order must be >= 0, got {gamma}")));
        }
        let q = integrate(|y| y.abs().powf(gamma) * h(y).abs() * self.density(y), domain, &[0.0], spec)?;
        let atom = if gamma == 0.0 { self.atom() * h(0.0).abs() } else { 0.0 };
        Ok(Quadrature { value: q.value + atom, abs_error: q.abs_error })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_validation() {
        assert!(SkewStickyParams::new(-0.1, 0.0).is_err());
        assert!(SkewStickyParams::new(1.0, 1.5).is_err());
        assert!(SkewStickyParams::new(1.0, f64::NAN).is_err());
        assert!(SkewStickyParams::new(0.0, 1.0).is_ok());
        assert!(SkewStickyParams::new(0.0, 1.0).unwrap().require_nonreflecting().is_err());
        assert!(SosBmParams::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(SosBmParams::new(1.0, 0.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn skew_weight_convention_at_zero() {
        let p = SkewStickyParams::new(1.0, 0.7).unwrap();
        assert_eq!(p.skew_weight(0.0), 1.0);
        assert_eq!(p.skew_weight(1e-300), 1.7);
        assert_eq!(p.skew_weight(-1e-300), 0.30000000000000004);
    }

    #[test]
    fn speed_measure_density() {
        // SkS-BM: density (1-beta) on the left, (1+beta) on the right
        let m = SpeedMeasure::new(SkewStickyParams::new(0.5, 0.3).unwrap().into());
        assert!((m.density(-2.0) - 0.7).abs() < 1e-15);
        assert!((m.density(2.0) - 1.3).abs() < 1e-15);
        assert_eq!(m.atom(), 0.5);

        let sos = SpeedMeasure::new(SosBmParams::new(0.0, 0.0, 2.0, 0.5).unwrap());
        assert!((sos.density(-1.0) - 0.25).abs() < 1e-15);
        assert!((sos.density(1.0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn integral_with_atom() {
        let m = SpeedMeasure::new(SkewStickyParams::new(2.0, 0.5).unwrap().into());
        let spec = QuadratureSpec::default();
        // h = indicator(0, 1]: integral (1+beta) * 1, atom does not contribute
        let q = m
            .integral(|y| if y > 0.0 && y <= 1.0 { 1.0 } else { 0.0 }, Domain::finite(-2.0, 2.0), &spec)
            .unwrap();
        assert!((q.value - 1.5).abs() < 1e-9);
        // h touching zero picks up the atom
        let q = m.integral(|y| if y.abs() <= 1.0 { 1.0 } else { 0.0 }, Domain::finite(-2.0, 2.0), &spec).unwrap();
        assert!((q.value - (0.5 + 1.5 + 2.0)).abs() < 1e-9);
    }
}
