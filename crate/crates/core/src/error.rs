use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: Pauli string has {found} qubits, expected {expected}")]
    InconsistentLength { line: usize, expected: usize, found: usize },

    #[error("line {line}: coefficient is not finite")]
    NonFiniteCoefficient { line: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot draw {requested} distinct non-identity Pauli strings on {num_qubits} qubits")]
    InfeasibleTermCount { num_qubits: usize, requested: usize },

    #[error("Hamiltonian has no non-identity terms")]
    NoNonIdentityTerms,

    #[error("posterior evidence {0:e} is numerically zero")]
    EvidenceUnderflow(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("target logical error {target:e} is below the floor reachable at distance {max_distance}")]
    DistanceOutOfRange { target: f64, max_distance: u32 },

    #[error("power-law fit did not converge after {0} iterations")]
    FitDidNotConverge(usize),

    #[error("no sweep point lies inside the validated RAE regime")]
    NoValidRaePoint,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
