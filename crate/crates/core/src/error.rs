use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid variable `{name}`: {reason}")]
    InvalidVariable { name: String, reason: String },

    #[error("index {index} out of range for radix {radix} at position {position}")]
    IndexOutOfRange {
        position: usize,
        index: usize,
        radix: usize,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown state `{state}` for variable `{variable}`")]
    UnknownState { variable: String, state: String },

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("cardinality clash on `{variable}`: {left} vs {right}")]
    CardinalityClash {
        variable: String,
        left: usize,
        right: usize,
    },

    #[error("cycle detected involving `{0}`")]
    Cycle(String),

    #[error("invalid gate function: {0}")]
    InvalidGate(String),

    #[error("invalid inhibitor vector for input {input}: {reason}")]
    InvalidInhibitor { input: usize, reason: String },

    #[error("invalid factor: {0}")]
    InvalidFactor(String),

    #[error("{what} infeasible: {size} joint states exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        size: u128,
        budget: u128,
    },

    #[error("compiler precondition not met: {0}")]
    Precondition(String),

    #[error("invalid evidence: {0}")]
    InvalidEvidence(String),

    #[error("impossible evidence")]
    ImpossibleEvidence,

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid link graph: {0}")]
    InvalidGraph(String),

    #[error("path-count state space too large: node `{node}` needs {states} states (cap {cap})")]
    StateSpaceTooLarge { node: String, states: u128, cap: usize },

    #[error("target `{target}` is not a descendant of source `{origin}`")]
    Unreachable { origin: String, target: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
}
