use thiserror::Error;

/// Errors produced by the screening library.
#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A formula transfer landed outside the grid `D`; the instance needs
    /// a larger `b`.
    #[error("capacity error: transfer {transfer} for type index {type_index} exceeds grid bound {bound}")]
    Capacity {
        type_index: usize,
        transfer: u64,
        bound: u64,
    },

    /// An enumeration exceeded its configured cap.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    /// An internal invariant that the theory guarantees was violated.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
