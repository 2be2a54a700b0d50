use thiserror::Error;

/// Errors raised by the thin-domain laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown surface kind `{0}`")]
    UnknownKind(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("non-finite geometry value `{quantity}` at (theta, z) = ({theta}, {z})")]
    NonFiniteGeometry { quantity: &'static str, theta: f64, z: f64 },

    #[error("thickness profile violates (g-bounds): {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("Jacobian factor {factor:.3e} below 0.5 at (t, theta, z) = ({t}, {theta}, {z})")]
    Singular { factor: f64, t: f64, theta: f64, z: f64 },

    #[error("non-finite integrand at (t, theta, z) = ({t}, {theta}, {z})")]
    Evaluation { t: f64, theta: f64, z: f64 },

    #[error("degenerate field: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{message} (residual history: {history:?})")]
    NonConvergence { message: String, history: Vec<f64> },

    #[error("adaptive quadrature failed on subinterval [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },

    #[error("resolution error: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p must lie in (1, ∞), got {p}")))
    }
}
