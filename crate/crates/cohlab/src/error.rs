use thiserror::Error;

/// Hard cap on any matrix dimension produced by tensor operations.
pub const MAX_DIM: usize = 4096;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("dimension {0} exceeds the configured limit of {max}", max = MAX_DIM)]
    DimensionLimit(usize),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("channel does not commute with the dephasing map (deviation {0:.3e})")]
    NotDephasingCovariant(f64),
    #[error("invalid trigger set: {0}")]
    InvalidTriggerSet(String),
    #[error("gate is neither incoherent nor a (controlled) Hadamard: {0}")]
    UnclassifiableGate(String),
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown gadget `{0}`")]
    UnknownGadget(String),
    #[error("invalid state constructor `{0}`: {1}")]
    StateSpec(String, String),
    #[error("invalid circuit: {0}")]
    Circuit(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
