use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    InvalidField(String),

    #[error("element {value} is outside the field of order {order}")]
    ElementOutOfRange { value: u64, order: u64 },

    #[error("objects belong to different field contexts")]
    ContextMismatch,

    #[error("subspaces are linear over different subfields (F_q^{left} vs F_q^{right})")]
    BaseMismatch { left: usize, right: usize },

    #[error("{e} does not divide the extension degree {m}")]
    NotDivisor { e: usize, m: usize },

    #[error("inversion of zero")]
    ZeroInverse,

    #[error("scalar must be nonzero")]
    ZeroScalar,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("enumeration needs {required} steps, cap is {cap}")]
    CapExceeded { required: u128, cap: u64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("block {index} has rank weight {weight} but length {length}; a one-dimensional block is MRD only when its weight equals its length")]
    InvalidBlock {
        index: usize,
        weight: usize,
        length: usize,
    },

    #[error("code has no weight-complementary decomposition attached")]
    MissingDecomposition,

    #[error("code is not completely decomposable")]
    NotDecomposable,

    #[error("falsification alarm: {0}")]
    FalsificationAlarm(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
