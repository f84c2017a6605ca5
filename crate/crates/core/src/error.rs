use thiserror::Error;

/// Errors raised by state construction, channel application and capacity evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdcError {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("total dimension {dim} exceeds the supported maximum of {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("parameter `{name}` = {value} outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("probabilities do not form a distribution: {0}")]
    Normalization(String),

    #[error("support of the first argument is not contained in the support of the second")]
    SupportViolation,

    #[error("unsupported correlation pattern: {0}")]
    UnsupportedCorrelation(String),

    #[error("channel is not trace preserving (completeness residual {0:.3e})")]
    NotTracePreserving(f64),

    #[error("no sign change of the target function on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("unknown case `{0}`")]
    UnknownCase(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SdcError>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(SdcError::ParameterOutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}
