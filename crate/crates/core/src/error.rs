use thiserror::Error;

/// Failure modes shared by every field evaluation and solver in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SheetError {
    /// The query point lies on (or within the exclusion zone of) spiral `spiral`.
    #[error("point lies on spiral sheet {spiral}")]
    OnSpiral { spiral: usize },
    #[error("the origin is excluded from the flow domain")]
    Origin,
    /// `sin(4πa²/(1+a²))` vanishes, so the closed-form strip constant is undefined.
    #[error("resonant parameter a = {a}: sin(4*pi*a^2/(1+a^2)) vanishes")]
    ResonantParameter { a: f64 },
    #[error("singular linear system (conditioning indicator {indicator:e})")]
    SingularSystem { indicator: f64 },
    /// The strip point lies on the preimage line of spiral `line`.
    #[error("point lies on cut line {line} of the strip")]
    OnCutLine { line: usize },
    #[error("point lies outside the open strip")]
    OutsideStrip,
    #[error("probe offset reaches a neighbouring sheet turn")]
    ProbeTooClose,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, SheetError>;
