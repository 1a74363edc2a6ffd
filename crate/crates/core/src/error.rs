use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("gate {gate} references qubit {qubit} but the circuit has {n} qubits")]
    QubitOutOfRange { gate: usize, qubit: usize, n: usize },

    #[error("gate {gate} lists qubit {qubit} more than once")]
    DuplicateQubit { gate: usize, qubit: usize },

    #[error("gate {gate} has no qubits")]
    EmptyGate { gate: usize },

    #[error("circuit must have at least one qubit")]
    NoQubits,

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("topology is disconnected: core {from} cannot reach core {to}")]
    Disconnected { from: usize, to: usize },

    #[error("infeasible capacity: {qubits} qubits but total capacity is {capacity}")]
    InfeasibleCapacity { qubits: usize, capacity: usize },

    #[error("gate {gate} acts on {width} qubits but the largest core holds {max_capacity}")]
    UnmappableGate { gate: usize, width: usize, max_capacity: usize },

    #[error("weighting parameter must be non-negative, got {0}")]
    NegativeLambda(f64),

    #[error("solution has {got} variables, problem expects {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("exact solver budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("slice {slice} has no valid partition")]
    NoValidPartition { slice: usize },

    #[error("window budget of {budget} variables cannot hold one slice of {per_slice}")]
    WindowTooSmall { budget: usize, per_slice: usize },

    #[error("window {window} produced an invalid assignment (H_a = {penalty}) after retry")]
    WindowFailed { window: usize, penalty: u64 },

    #[error("invalid benchmark request: {0}")]
    InvalidBenchmark(String),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Malformed(_) | Error::Json(_) | Error::Parse(_) => "malformed",
            Error::QubitOutOfRange { .. } => "qubit_out_of_range",
            Error::DuplicateQubit { .. } => "duplicate_qubit",
            Error::EmptyGate { .. } => "empty_gate",
            Error::NoQubits => "no_qubits",
            Error::InvalidTopology(_) => "invalid_topology",
            Error::Disconnected { .. } => "disconnected_topology",
            Error::InfeasibleCapacity { .. } => "infeasible_capacity",
            Error::UnmappableGate { .. } => "unmappable_gate",
            Error::NegativeLambda(_) => "negative_lambda",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::BudgetExceeded(_) => "budget_exceeded",
            Error::NoValidPartition { .. } => "no_valid_partition",
            Error::WindowTooSmall { .. } => "window_too_small",
            Error::WindowFailed { .. } => "window_failed",
            Error::InvalidBenchmark(_) => "invalid_benchmark",
            Error::Io(_) => "io",
        }
    }
}
