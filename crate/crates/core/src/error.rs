use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Bloch z component {0} outside [-1, 1]")]
    ZOutOfRange(f64),

    #[error("non-finite operator coefficient")]
    NonFinite,

    #[error("Pauli coefficient matrix is not normalized: rho_00 = {0}")]
    NotNormalized(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no feasible radius in bracket [{lo}, {hi}]")]
    NoFeasibleRadius { lo: f64, hi: f64 },

    #[error("decomposition infeasible after admission (phase-one residual {residual:e}); margin eta too small")]
    MarginTooSmall { residual: f64 },

    #[error("graph error: {0}")]
    Graph(String),

    #[error("program error: {0}")]
    Program(String),

    #[error("instance has {n} qubits, above the dense cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("instance rejected by admission test: nodes {0:?} outside the simulatable region")]
    Rejected(Vec<usize>),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
