use thiserror::Error;

/// Errors produced while building or simulating circuits and running experiments.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit budget exceeded: {requested} qubits requested, budget is {budget}")]
    QubitBudget { requested: usize, budget: usize },

    #[error("enumeration budget exceeded: {requested} trajectories, budget is {budget}")]
    EnumerationBudget { requested: u128, budget: u128 },

    #[error("register layout must contain at least one qubit")]
    EmptyLayout,

    #[error("duplicate register name `{0}`")]
    DuplicateRegister(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("qubit index {index} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("gate qubits overlap: qubit {0} appears more than once")]
    OverlappingQubits(usize),

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix dimension {found} does not match {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("input columns are not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("non-finite angle {0}")]
    NonFiniteAngle(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid MDP: {0}")]
    InvalidMdp(String),

    #[error("policy does not match MDP: {0}")]
    PolicyMismatch(String),

    #[error("return encoding overflow: {0}")]
    EncodingOverflow(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("outcome {outcome} out of range for a {bits}-bit register")]
    OutcomeOutOfRange { outcome: usize, bits: usize },

    #[error("operator subspace did not close after {0} Krylov vectors")]
    SubspaceNotInvariant(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
