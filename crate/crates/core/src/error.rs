use thiserror::Error;

/// Errors shared by every module of the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("operator shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("ambient cap exceeded: requested {requested}, cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("algebra family mismatch: {left} vs {right}")]
    FamilyMismatch { left: String, right: String },

    #[error("the zero element has no degree")]
    ZeroElement,

    #[error("subspace is zero-dimensional")]
    ZeroSubspace,

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("parse error at byte {pos}: negative exponents are only available in group algebras")]
    NegativeExponent { pos: usize },

    #[error("parse error at byte {pos}: unknown generator `{name}`")]
    UnknownGenerator { pos: usize, name: String },

    #[error("basis size {size} exceeds the exhaustive-scan cap {cap}; use witness search instead")]
    BasisTooLarge { size: usize, cap: usize },

    #[error("invalid family selector `{0}`")]
    BadFamily(String),

    #[error("fit window too small: need at least 3 points with n >= 2")]
    WindowTooSmall,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
