//! Test functions, normalizing sequences and transform functions that feed
//! the high-frequency statistics.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::SosBmParams;

#[derive(Clone)]
enum Kind {
    /// `(1 - |y|)_+` away from 0, exactly 0 at 0.
    Hat,
    /// Indicator of `(0, 1]`.
    IndicatorUnitPos,
    /// Indicator of `[-1, 0)`.
    IndicatorUnitNeg,
    /// `exp(-y^2/2)` away from 0, exactly 0 at 0 (a.e. a Gaussian).
    GaussianHole,
    /// `exp(-y^2/2)` everywhere; `g(0) = 1`, the negative control.
    Gaussian,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A bounded integrable test function with its declared analytics: sup norm,
/// one-sided Lebesgue integrals, whether it vanishes at 0 and an optional
/// support radius (used to truncate quadratures).
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    kind: Kind,
    sup_norm: f64,
    integral_neg: f64,
    integral_pos: f64,
    vanishes_at_zero: bool,
    support_radius: Option<f64>,
}

const SQRT_HALF_PI: f64 = 1.2533141373155003;

impl TestFunction {
    pub fn hat() -> Self {
        Self {
            name: "hat".into(),
            kind: Kind::Hat,
            sup_norm: 1.0,
            integral_neg: 0.5,
            integral_pos: 0.5,
            vanishes_at_zero: true,
            support_radius: Some(1.0),
        }
    }

    pub fn indicator_unit_pos() -> Self {
        Self {
            name: "indicator_pos".into(),
            kind: Kind::IndicatorUnitPos,
            sup_norm: 1.0,
            integral_neg: 0.0,
            integral_pos: 1.0,
            vanishes_at_zero: true,
            support_radius: Some(1.0),
        }
    }

    pub fn indicator_unit_neg() -> Self {
        Self {
            name: "indicator_neg".into(),
            kind: Kind::IndicatorUnitNeg,
            sup_norm: 1.0,
            integral_neg: 1.0,
            integral_pos: 0.0,
            vanishes_at_zero: true,
            support_radius: Some(1.0),
        }
    }

    pub fn gaussian_hole() -> Self {
        Self {
            name: "gauss_hole".into(),
            kind: Kind::GaussianHole,
            sup_norm: 1.0,
            integral_neg: SQRT_HALF_PI,
            integral_pos: SQRT_HALF_PI,
            vanishes_at_zero: true,
            support_radius: None,
        }
    }

    /// Negative control: same Gaussian but `g(0) = 1`. At a sticky threshold
    /// the statistic built from it diverges instead of converging.
    pub fn gaussian() -> Self {
        Self {
            name: "gauss".into(),
            kind: Kind::Gaussian,
            sup_norm: 1.0,
            integral_neg: SQRT_HALF_PI,
            integral_pos: SQRT_HALF_PI,
            vanishes_at_zero: false,
            support_radius: None,
        }
    }

    pub fn custom(
        name: &str,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        sup_norm: f64,
        integral_neg: f64,
        integral_pos: f64,
        vanishes_at_zero: bool,
        support_radius: Option<f64>,
    ) -> Result<Self> {
        if vanishes_at_zero && f(0.0) != 0.0 {
            return Err(Error::InvalidParameter(
                "test function declared as vanishing at 0 but g(0) != 0".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            kind: Kind::Custom(f),
            sup_norm,
            integral_neg,
            integral_pos,
            vanishes_at_zero,
            support_radius,
        })
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "hat" => Some(Self::hat()),
            "indicator_pos" => Some(Self::indicator_unit_pos()),
            "indicator_neg" => Some(Self::indicator_unit_neg()),
            "gauss_hole" => Some(Self::gaussian_hole()),
            "gauss" => Some(Self::gaussian()),
            _ => None,
        }
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        match &self.kind {
            Kind::Hat => {
                if y == 0.0 {
                    0.0
                } else {
                    (1.0 - y.abs()).max(0.0)
                }
            }
            Kind::IndicatorUnitPos => {
                if y > 0.0 && y <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::IndicatorUnitNeg => {
                if (-1.0..0.0).contains(&y) {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::GaussianHole => {
                if y == 0.0 {
                    0.0
                } else {
                    (-0.5 * y * y).exp()
                }
            }
            Kind::Gaussian => (-0.5 * y * y).exp(),
            Kind::Custom(f) => f(y),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// `∫_{-inf}^0 g`.
    pub fn integral_neg(&self) -> f64 {
        self.integral_neg
    }

    /// `∫_0^inf g`.
    pub fn integral_pos(&self) -> f64 {
        self.integral_pos
    }

    pub fn vanishes_at_zero(&self) -> bool {
        self.vanishes_at_zero
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    /// Limit constant of the local-time statistic: `m_0(g)` for the speed
    /// measure of the given process, `(1-b)/s-^2 ∫g_<0 + (1+b)/s+^2 ∫g_>0`
    /// plus `rho g(0)` (zero whenever `g(0) = 0`).
    pub fn speed_measure_limit(&self, params: &SosBmParams) -> f64 {
        let sm = params.sigma_minus();
        let sp = params.sigma_plus();
        (1.0 - params.beta()) / (sm * sm) * self.integral_neg
            + (1.0 + params.beta()) / (sp * sp) * self.integral_pos
            + params.rho() * self.eval(0.0)
    }
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction").field("name", &self.name).finish()
    }
}

/// Normalizing sequence `u_n` with `u_n -> inf` and `u_n / n -> 0`.
#[derive(Clone)]
pub enum NormalizingSequence {
    /// `u_n = n^alpha`, `alpha` in (0, 1). `alpha = 1/2` is the classical
    /// choice (mode with `log n / u_n -> 0`).
    Power(f64),
    /// `u_n = ln n` (mode with `u_n^2 / n -> 0`).
    Log,
    Custom(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
}

impl NormalizingSequence {
    pub fn sqrt() -> Self {
        Self::Power(0.5)
    }

    pub fn value(&self, n: u64) -> f64 {
        match self {
            Self::Power(alpha) => (n as f64).powf(*alpha),
            Self::Log => (n as f64).ln(),
            Self::Custom(f) => f(n),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Power(a) if *a == 0.5 => "sqrt".into(),
            Self::Power(a) => format!("pow{a}"),
            Self::Log => "log".into(),
            Self::Custom(_) => "custom".into(),
        }
    }

    /// Divergence checks over the audit range `n <= 10^9`: `u_n` positive and
    /// increasing, `u_n/n` decreasing to a negligible value.
    pub fn validate(&self) -> Result<()> {
        if let Self::Power(alpha) = self {
            if !(*alpha > 0.0 && *alpha < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "power exponent must lie in (0,1), got {alpha}"
                )));
            }
            return Ok(());
        }
        let ladder: [u64; 9] = [10, 100, 1_000, 10_000, 100_000, 1_000_000, 10_000_000, 100_000_000, 1_000_000_000];
        let mut prev_u = 0.0;
        let mut prev_ratio = f64::INFINITY;
        for n in ladder {
            let u = self.value(n);
            if !u.is_finite() || u <= 0.0 {
                return Err(Error::InvalidParameter(format!("u_n must be positive and finite, u_{n} = {u}")));
            }
            if u <= prev_u {
                return Err(Error::InvalidParameter(format!("u_n must diverge, stalled at n = {n}")));
            }
            let ratio = u / n as f64;
            if ratio >= prev_ratio {
                return Err(Error::InvalidParameter(format!("u_n/n must decrease, violated at n = {n}")));
            }
            prev_u = u;
            prev_ratio = ratio;
        }
        if prev_ratio > 1e-3 {
            return Err(Error::InvalidParameter("u_n/n does not vanish on the audit range".into()));
        }
        Ok(())
    }
}

impl std::fmt::Debug for NormalizingSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NormalizingSequence({})", self.name())
    }
}

/// A transform `T` with `T(0) = 0`, `T'(0) = 1` and derivatives pinched by the
/// ellipticity constant: `eps <= T' <= 1/eps`, `|T''| <= 1/eps`.
#[derive(Clone)]
pub struct TransformFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    d2f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    ellipticity: f64,
    identity: bool,
}

impl TransformFunction {
    pub fn identity() -> Self {
        Self {
            f: Arc::new(|y| y),
            df: Arc::new(|_| 1.0),
            d2f: Arc::new(|_| 0.0),
            ellipticity: 1.0,
            identity: true,
        }
    }

    /// `T(y) = y + y^2 / (2 (1 + |y|))`: a C^2 perturbation of the identity
    /// with `T'` in [1/2, 3/2] and `|T''| <= 1`, so `eps = 1/2` works.
    pub fn smooth_bend() -> Self {
        Self {
            f: Arc::new(|y: f64| y + y * y / (2.0 * (1.0 + y.abs()))),
            df: Arc::new(|y: f64| 1.0 + y * (2.0 + y.abs()) / (2.0 * (1.0 + y.abs()).powi(2))),
            d2f: Arc::new(|y: f64| 1.0 / (1.0 + y.abs()).powi(3)),
            ellipticity: 0.5,
            identity: false,
        }
    }

    pub fn new(
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        d2f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        ellipticity: f64,
    ) -> Result<Self> {
        let t = Self { f, df, d2f, ellipticity, identity: false };
        t.validate()?;
        Ok(t)
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        (self.f)(y)
    }

    pub fn derivative(&self, y: f64) -> f64 {
        (self.df)(y)
    }

    pub fn second_derivative(&self, y: f64) -> f64 {
        (self.d2f)(y)
    }

    pub fn ellipticity(&self) -> f64 {
        self.ellipticity
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// Spot-checks the ellipticity envelope on a symmetric grid.
    pub fn validate(&self) -> Result<()> {
        if (self.f)(0.0) != 0.0 {
            return Err(Error::InvalidParameter("transform must satisfy T(0) = 0".into()));
        }
        if ((self.df)(0.0) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("transform must satisfy T'(0) = 1".into()));
        }
        let eps = self.ellipticity;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter("ellipticity must lie in (0, 1]".into()));
        }
        let mut y = -50.0;
        while y <= 50.0 {
            let d = (self.df)(y);
            let d2 = (self.d2f)(y);
            if !(d >= eps * (1.0 - 1e-12) && d <= (1.0 / eps) * (1.0 + 1e-12)) {
                return Err(Error::InvalidParameter(format!("T'({y}) = {d} escapes [eps, 1/eps]")));
            }
            if d2.abs() > (1.0 / eps) * (1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!("|T''({y})| = {} exceeds 1/eps", d2.abs())));
            }
            y += 0.25;
        }
        Ok(())
    }
}

impl std::fmt::Debug for TransformFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TransformFunction(eps = {})", self.ellipticity)
    }
}
