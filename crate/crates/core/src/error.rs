use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: u32, n_qubits: u32 },
    #[error("gate `{gate}` expects {expected} qubit(s), got {got}")]
    Arity { gate: &'static str, expected: usize, got: usize },
    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(u32),
    #[error("{needed} atoms requested but capacity is {capacity}")]
    Capacity { needed: usize, capacity: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("move distance must be non-negative, got {0}")]
    NegativeDistance(f64),
    #[error("ancilla {0} is not fresh")]
    AncillaNotFresh(u32),
    #[error("fan-out group rooted at qubit {0} is not live")]
    GroupNotLive(u32),
    #[error("no movement-legal CZ variant for pair ({0}, {1})")]
    NoLegalVariant(u32, u32),
    #[error("dominance graph is empty")]
    EmptyDag,
    #[error("Pauli string has no non-identity operator")]
    EmptyPauliString,
    #[error("Pauli string has {got} operators for {expected} qubits")]
    PauliLength { expected: u32, got: usize },
    #[error("gate `{0}` is not in the CZ + single-qubit basis")]
    NotInBasis(&'static str),
    #[error("{n} qubits exceed the simulator limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("ancilla {ancilla} is still entangled at retirement (|1> weight {leakage:e})")]
    AncillaNotDisentangled { ancilla: u32, leakage: f64 },
    #[error("schedule is malformed: {0}")]
    MalformedSchedule(String),
    #[error("schedule failed validation with {0} violation(s)")]
    InvalidSchedule(usize),
    #[error("edge ({0}, {1}) is a self-loop or out of range")]
    InvalidEdge(u32, u32),
    #[error("edge ({0}, {1}) appears more than once")]
    DuplicateEdge(u32, u32),
    #[error("invalid noise parameters: {0}")]
    InvalidNoise(&'static str),
}
