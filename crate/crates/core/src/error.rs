use thiserror::Error;

/// Errors raised while building or simulating circuits.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("gate `{gate}` takes {expected} parameter(s), got {got}")]
    ParamCount {
        gate: String,
        expected: usize,
        got: usize,
    },

    #[error("gate `{gate}` expects {expected} wire(s), got {got}")]
    WireCount {
        gate: String,
        expected: usize,
        got: usize,
    },

    #[error("duplicate wire {0}")]
    DuplicateWire(usize),

    #[error("wire {wire} out of range for a {width}-qubit circuit")]
    WireOutOfRange { wire: usize, width: usize },

    #[error("matrix of dimension {rows}x{cols} does not act on {qubits} qubit(s)")]
    Dimension {
        rows: usize,
        cols: usize,
        qubits: usize,
    },

    #[error("matrix is not unitary (max |UU^dagger - I| = {max_deviation:.3e})")]
    NonUnitary { max_deviation: f64 },

    #[error("unknown classical bit `{0}`")]
    UnknownClbit(String),

    #[error("classical bit `{0}` is already written by an earlier measurement")]
    DuplicateClbit(String),

    #[error("classical bit `{0}` is read before it was measured")]
    UnsetClbit(String),

    #[error("cannot convert circuit to a gate: element {index} ({kind}) is not a unitary gate")]
    NotUnitaryElement { index: usize, kind: &'static str },

    #[error("{qubits} qubits exceeds the limit of {limit} for {what}")]
    TooManyQubits {
        qubits: usize,
        limit: usize,
        what: &'static str,
    },

    #[error("invalid simulation job: {0}")]
    InvalidJob(String),

    #[error("malformed Pauli string `{0}`")]
    MalformedPauli(String),

    #[error("qubit {0} is entangled with the rest of the register")]
    NotProductState(usize),

    #[error("parameter {0} does not drive a shift-eligible rotation")]
    NotShiftEligible(usize),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
