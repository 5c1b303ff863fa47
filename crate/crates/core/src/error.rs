use thiserror::Error;

use crate::pauli::PauliOp;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid Pauli label {0:?}")]
    InvalidLabel(String),

    #[error("qubit count {0} exceeds the supported maximum of {max}", max = crate::pauli::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("fidelity of {pauli} is {value:e}, too close to zero for a logarithm")]
    SingularFidelity { pauli: PauliOp, value: f64 },

    #[error("the identity Pauli cannot carry a generator rate")]
    IdentityRate,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("map is not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("fidelity extraction failed for {pauli}: {reason}")]
    Extraction { pauli: PauliOp, reason: String },

    #[error("{what} supports at most {max} qubits, got {n}")]
    SizeLimit { what: &'static str, max: usize, n: usize },

    #[error("unsupported file format {0:?}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
