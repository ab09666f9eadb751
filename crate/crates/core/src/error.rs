use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time must be strictly positive, got {0}")]
    NonpositiveTime(f64),

    #[error("|beta| = 1 is a reflecting threshold; use the reflected sampler instead")]
    ReflectionUnsupported,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: best estimate {value} with error bound {error}")]
    QuadratureNonConvergent { value: f64, error: f64 },

    #[error("root bracket [{lo}, {hi}] does not straddle a sign change")]
    BracketDoesNotStraddle { lo: f64, hi: f64 },

    #[error("one-sided integral of the test function vanishes on the {0} side")]
    ZeroNormalizer(&'static str),

    #[error("reference local time is undefined for rho = 0; use an occupation statistic instead")]
    ZeroStickiness,

    #[error("reflected sampling requires a nonnegative start, got {0}")]
    NegativeStart(f64),

    #[error("transform is not invertible: one-sided derivatives must be strictly positive")]
    NonInvertibleTransform,

    #[error("sigma must be strictly positive on the integration range")]
    NonEllipticSigma,

    #[error("path CSV schema violation at line {line}: {message}")]
    PathCsvSchema { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
