use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("{n_qubits} qubits exceeds the dense cap of {cap}")]
    DimensionCap { n_qubits: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized (norm = {norm})")]
    Unnormalized { norm: f64 },

    #[error("invalid Pauli string {0:?}")]
    InvalidPauli(String),

    #[error("FCIDUMP parse error on line {line}: {msg}")]
    Fcidump { line: usize, msg: String },

    #[error("orbital index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("integral symmetry violated at {site}: {a} vs {b}")]
    Asymmetric { site: String, a: f64, b: f64 },

    #[error("invalid orbital map: {0}")]
    OrbitalMap(String),

    #[error("sign constraint violated on qubit {qubit}: eta = {value}")]
    SignConstraint { qubit: usize, value: f64 },

    #[error("excitation ({0}) is not an occupied-to-virtual index")]
    Excitation(String),

    #[error("time {t} outside [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },

    #[error("norm drift {drift:e} exceeds tolerance; use more time steps")]
    NormDrift { drift: f64 },

    #[error("operator leaks out of the invariant subspace at basis state {index}")]
    SubspaceLeak { index: usize },

    #[error("Hamiltonian is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("bracket expansion exhausted after {steps} doublings (last T = {last_t})")]
    BracketExhausted { steps: usize, last_t: f64 },

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("fixture metadata: {0}")]
    Metadata(String),

    #[error("config: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
