use thiserror::Error;

use crate::structure::Elem;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element {0} is not in the structure")]
    UnknownElement(Elem),

    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),

    #[error("relation `{symbol}` has arity {expected}, got an instance of size {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },

    #[error("relation instances must consist of distinct elements")]
    RepeatedElement,

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("signatures differ")]
    SignatureMismatch,

    #[error("the two structures disagree on the shared base")]
    BaseMismatch,

    #[error("element sets overlap outside the declared base")]
    OverlapViolation,

    #[error("sets are not pairwise disjoint")]
    SetsNotDisjoint,

    #[error("alpha interval ({lo}, {hi}) contains the threshold {threshold}; narrow the interval")]
    InsufficientPrecision {
        lo: String,
        hi: String,
        threshold: String,
    },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("base set is not strong in the structure")]
    NotStrong,

    #[error("alpha out of range: {0}")]
    AlphaOutOfRange(String),

    #[error("invalid alpha specification: {0}")]
    InvalidAlpha(String),

    #[error("k*beta = {0} is not above -1")]
    XRangeViolation(String),

    #[error("unachievable: {0}")]
    Unachievable(String),

    #[error("edge probability {0} exceeds 1")]
    ProbabilityOverflow(String),

    #[error("operation requires a single binary relation symbol")]
    NotAGraph,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
