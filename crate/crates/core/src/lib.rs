//! Generalized noisy-or canonical models for discrete Bayesian networks.
//!
//! A noisy gate combines a deterministic [`GateFunction`] with an
//! independent failure device on every input line. [`noisy`] compiles such
//! gates into ordinary conditional tables, [`inference`] answers posterior
//! queries by variable elimination, and the reliability and diagnosis modules
//! build network-reliability and circuit-diagnosis models on top.

pub mod diagnosis;
pub mod error;
pub mod factor;
pub mod gate;
pub mod index;
pub mod inference;
pub mod network;
pub mod noisy;
pub mod oracle;
pub mod random;
pub mod reliability;
pub mod variable;

pub use diagnosis::{build_circuit_model, diagnose, Circuit, CircuitGate, DeviceFailure, FaultModel, GateKind};
pub use error::{Error, Result};
pub use factor::Factor;
pub use gate::{GateFunction, DEFAULT_BUDGET};
pub use index::mixed_radix_index;
pub use inference::{eliminate, EliminationOrder, MarginalSet, Query};
pub use network::{
    topological_order, validate_network, Backing, CompiledNetwork, Network, NodeSpec, ValidationReport, Violation,
};
pub use noisy::{
    check_strict_positivity, choose_compiler, compile_boolean_noisy_or, compile_general, compile_nary_boolean_output,
    line_distribution, nofail_probability, CompileOptions, CompilePath, CompileStats, InhibitorVector, NoisyGateSpec,
    PositivityReport,
};
pub use reliability::{
    build_connectivity_model, build_path_count_model, path_count_distribution, query_connectivity,
    query_path_distribution, two_terminal_reliability, Link, LinkGraph, ReliabilityOptions,
};
pub use variable::{Evidence, Variable};
