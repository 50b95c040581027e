use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Laplace integral diverges: Re(s) = {re_s} does not exceed growth bound {growth}")]
    DivergentTransform { re_s: f64, growth: f64 },

    #[error("contour abscissa sigma = {sigma} lies on or left of a pole at {pole_re}{pole_im:+}i")]
    ContourBelowPole { sigma: f64, pole_re: f64, pole_im: f64 },

    #[error("contour abscissa sigma = {sigma} does not exceed the abscissa {abscissa}")]
    ContourBelowAbscissa { sigma: f64, abscissa: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("precision loss: estimated rounding error {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    PrecisionLoss { estimate: f64, tolerance: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("root not found: {0}")]
    RootNotFound(String),

    #[error("overflow at t = {t}")]
    Overflow { t: f64 },

    #[error("pole hit: |denominator| = {denominator:.3e} at s = {s_re}{s_im:+}i")]
    PoleHit { denominator: f64, s_re: f64, s_im: f64 },

    #[error("tail bound {bound:.3e} exceeds tolerance {tol:.3e} (t = {t}, tau_max = {tau_max})")]
    TailNotBounded { bound: f64, tol: f64, t: f64, tau_max: f64 },

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("instability: |u| = {value:.3e} exceeds bound {bound:.3e} at t = {t}")]
    Instability { value: f64, bound: f64, t: f64 },

    #[error("linear solver failure: {0}")]
    SolverFailure(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::Parse(_) | Error::Domain(_) => 2,
            Error::ContourBelowPole { .. }
            | Error::ContourBelowAbscissa { .. }
            | Error::DivergentTransform { .. } => 3,
            Error::HypothesisViolation(_) => 4,
            Error::Io(_) => 1,
            _ => 5,
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
