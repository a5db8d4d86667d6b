use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational from {0:?}; expected \"a/b\" or \"a\"")]
    ParseRational(String),
    #[error("p = {0} must lie strictly between 0 and 1")]
    ProbabilityOutOfRange(String),
    #[error("ground set size n = {n} outside supported range 1..={max}")]
    GroundSetSize { n: usize, max: usize },
    #[error("element {element} exceeds n={n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("symbol {symbol} outside alphabet [1, {m}]")]
    SymbolOutOfRange { symbol: usize, m: usize },
    #[error("duplicate member {0}")]
    DuplicateMember(String),
    #[error("families live on different spaces ({left} vs {right})")]
    Mismatch { left: String, right: String },
    #[error("shift sets A and B overlap")]
    OverlappingShift,
    #[error("input pair is not cross {0}-intersecting")]
    NotCrossIntersecting(usize),
    #[error("operation requires a nonempty family")]
    EmptyFamily,
    #[error("symbol set must be a proper subset of [m]")]
    FullSymbolSet,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("search scale exceeded: {0}")]
    Scale(String),
    #[error("malformed family JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
}

impl Error {
    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub(crate) fn scale(msg: impl Into<String>) -> Self {
        Error::Scale(msg.into())
    }
}
