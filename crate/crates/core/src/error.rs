use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is invalid, every cyclic factor needs m >= 2")]
    InvalidModulus(u64),

    #[error("group order must be at least 2")]
    TrivialGroup,

    #[error("group order {order} exceeds the dense cap {cap}")]
    CapExceeded { order: u128, cap: usize },

    #[error("element has {got} coordinates, group has {expected} factors")]
    LengthMismatch { expected: usize, got: usize },

    #[error("coordinate {coord} is not reduced modulo {modulus}")]
    UnreducedCoordinate { coord: u64, modulus: u32 },

    #[error("index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("subsets belong to different groups")]
    GroupMismatch,

    #[error("{0} must be nonempty")]
    EmptySet(&'static str),

    #[error("{what}: size {size} exceeds the enumeration guard {limit}")]
    GuardExceeded {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
