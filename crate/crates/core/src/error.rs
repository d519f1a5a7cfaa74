use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("noise channel {index} out of range ({len} channels)")]
    ChannelOutOfRange { index: usize, len: usize },

    #[error("state does not match the {expected} algebra")]
    StateMismatch { expected: &'static str },

    #[error("singular configuration: spring length {r} below {r_min}")]
    SingularConfiguration { r: f64, r_min: f64 },

    #[error("non-finite state after step {step}")]
    Divergence { step: usize },

    #[error("tangent norm {norm:e} out of exponent range at step {step}")]
    ExponentRange { step: usize, norm: f64 },

    #[error("infeasible Casimir values: {0}")]
    Infeasible(String),

    #[error("noise directions do not span the algebra (rank {rank} < {dim}); the measure need not be ergodic")]
    NonSpanningNoise { rank: usize, dim: usize },

    #[error("zero vector cannot be binned on the sphere")]
    ZeroVector,

    #[error("configuration is not a Lagrange top: {0}")]
    NotLagrange(String),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
