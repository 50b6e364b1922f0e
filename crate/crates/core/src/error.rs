use thiserror::Error;

/// Violations of the contest-spec invariants, reported in check order.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("NonPositiveTheta: sabotage effectiveness must be a positive finite number, got {0}")]
    NonPositiveTheta(f64),
    #[error("GroupCount: exactly two groups are required, got {0}")]
    GroupCount(usize),
    #[error("GroupTooSmall: group {group} has {len} player(s), at least 2 are required")]
    GroupTooSmall { group: usize, len: usize },
    #[error("NonFiniteValuation: valuation of player ({group},{index}) is not finite")]
    NonFiniteValuation { group: usize, index: usize },
    #[error("ZeroValuation: valuation of player ({group},{index}) is zero")]
    ZeroValuation { group: usize, index: usize },
    #[error(
        "OrderingViolated: group {group} valuations must satisfy v1 > v2 >= ... > vn, \
         broken between players {index} and {next}",
        next = index + 1
    )]
    OrderingViolated { group: usize, index: usize },
    #[error(
        "SignViolated: group {group} needs a positive highest valuation and a negative lowest \
         valuation"
    )]
    SignViolated { group: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("UnknownPlayer: no player ({group},{index}) in this contest")]
    UnknownPlayer { group: usize, index: usize },
    #[error("InvalidEffort: efforts must be finite and nonnegative, got x={x}, y={y}")]
    InvalidEffort { x: f64, y: f64 },
    #[error("NonFiniteInput: effective efforts must be finite, got ({z1}, {z2})")]
    NonFiniteInput { z1: f64, z2: f64 },
    #[error("DomainError: {0}")]
    Domain(String),
    #[error("EmptyGrid: region grids need at least one point on each axis")]
    EmptyGrid,
    #[error("NonPositiveGridPoint: grid value {0} is not strictly positive")]
    NonPositiveGridPoint(f64),
    #[error("ClassUnsatisfiable: {0}")]
    ClassUnsatisfiable(String),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
