use thiserror::Error;

/// Errors raised by the field, predictor, lattice, detector and diffraction routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum VortexError {
    #[error("SourceCoincidence: observation point coincides with source {0}")]
    SourceCoincidence(usize),

    #[error("UnequalAmplitudes: the closed-form model needs A1 = A2 = A3, got ({0}, {1}, {2})")]
    UnequalAmplitudes(f64, f64, f64),

    #[error("CollinearArrangement: sources are collinear (sin theta3 = 0 or a source sits at the origin)")]
    CollinearArrangement,

    #[error("DegenerateIndex: M(m) vanishes for m = {0}")]
    DegenerateIndex(i64),

    #[error("GridTooSmall: need at least 2x2 samples, got {rows}x{cols}")]
    GridTooSmall { rows: usize, cols: usize },

    #[error("SingularPoint: observation point lies on a pinhole")]
    SingularPoint,

    #[error("UnsupportedModel: {0}")]
    UnsupportedModel(String),

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
}

impl VortexError {
    /// Short stable name used on the diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            VortexError::SourceCoincidence(_) => "SourceCoincidence",
            VortexError::UnequalAmplitudes(..) => "UnequalAmplitudes",
            VortexError::CollinearArrangement => "CollinearArrangement",
            VortexError::DegenerateIndex(_) => "DegenerateIndex",
            VortexError::GridTooSmall { .. } => "GridTooSmall",
            VortexError::SingularPoint => "SingularPoint",
            VortexError::UnsupportedModel(_) => "UnsupportedModel",
            VortexError::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, VortexError>;
