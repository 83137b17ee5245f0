use thiserror::Error;

/// Errors raised by the spectral and counting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the zero wavevector has no direction")]
    ZeroWaveVector,
    #[error("divergence residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Divergence { residual: f64, tolerance: f64 },
    #[error("wavevectors {0:?}, {1:?}, {2:?} do not sum to zero")]
    Convolution([i64; 3], [i64; 3], [i64; 3]),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("fields are defined on different truncations")]
    TruncationMismatch,
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for failures of the computation itself (NaN, blow-up) rather than of the input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_))
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
