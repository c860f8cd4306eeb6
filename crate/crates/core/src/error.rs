use alloc::string::String;

/// Errors raised by the likelihood engine, the models and the optimizers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HmmError {
    /// The observation at `position` has probability zero under θ.
    #[error("observation {position} is impossible under the current parameters")]
    NumericalUnderflow { position: usize },
    /// The forward pass put zero forecast mass on a state the backward pass needs.
    #[error("degenerate posterior at position {position}: zero forecast with positive smoothing mass")]
    DegeneratePosterior { position: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("parameter {index} = {value} lies outside [{lower}, {upper}]")]
    OutOfBounds { index: usize, value: f64, lower: f64, upper: f64 },
    #[error("invalid bounds for parameter {index}: lower {lower} must be < upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },
    #[error("the sequence carries no genetic positions")]
    MissingPositions,
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("observation kind does not match the model: {0}")]
    ObservationKind(&'static str),
    #[error("{op}: argument {value} outside the domain")]
    Domain { op: &'static str, value: f64 },
    #[error("model error: {0}")]
    Model(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
}
