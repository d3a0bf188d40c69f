//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("overlapping pieces: [{left_a}, {right_a})·π intersects [{left_b}, {right_b})·π")]
    OverlappingPieces {
        left_a: String,
        right_a: String,
        left_b: String,
        right_b: String,
    },

    #[error("piece has empty or reversed interval [{left}, {right})·π")]
    EmptyInterval { left: String, right: String },

    #[error("operation requires modulation-free input")]
    ModulatedInput,

    #[error("cannot add overlapping pieces with different modulations")]
    IncompatibleModulations,

    #[error("scale {scale} and oversampling factor {p} are not coprime")]
    NotCoprime { scale: u32, p: u32 },

    #[error("invalid index: {reason}")]
    InvalidIndex { reason: String },

    #[error("wavelet lists must have the same cardinality ({left} vs {right})")]
    CardinalityMismatch { left: usize, right: usize },

    #[error("exact mode unsupported for this input: {reason}")]
    ModeUnsupported { reason: String },

    #[error("exact mode requires spectra supported away from zero frequency")]
    ZeroInnerRadius,

    #[error("window touches the accumulation point at {point}·π (epsilon {epsilon}·π)")]
    WindowTouchesAccumulationPoint { point: String, epsilon: String },

    #[error("probe point must be nonzero")]
    InvalidPoint,

    #[error("not a rational: `{text}` (expected `p/q` with q > 0)")]
    RationalSyntax { text: String },

    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },

    #[error("component count {found} does not match structure size {expected}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("structure failed validation: {0}")]
    InvalidStructure(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Exit-code class used by the command line: 2 for input errors, 3 for
    /// mode restrictions.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ModulatedInput
            | Error::IncompatibleModulations
            | Error::ModeUnsupported { .. }
            | Error::ZeroInnerRadius
            | Error::WindowTouchesAccumulationPoint { .. } => 3,
            _ => 2,
        }
    }
}
