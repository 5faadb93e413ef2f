//! Crate-wide error type.

use crate::circuit::{Family, ParamId};

/// Errors produced by circuit construction, contraction, and the oracle.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Requested qubit count is not valid for the ansatz family.
    #[error("{family} requires {requirement}, got N = {n_qubits}")]
    InvalidQubitCount {
        family: Family,
        requirement: &'static str,
        n_qubits: usize,
    },

    /// A register index fell outside `1..=N`.
    #[error("register {register} out of range for {n_qubits} qubits")]
    RegisterOutOfRange { register: usize, n_qubits: usize },

    /// A `(j, k)` parameter id does not name a rotation gate of the circuit.
    #[error("parameter ({}, {}) does not exist in this circuit", param.register, param.ordinal)]
    UnknownParam { param: ParamId },

    /// Angle vector length does not match the circuit's parameter count.
    #[error("expected {expected} angles, got {got}")]
    ThetaLengthMismatch { expected: usize, got: usize },

    /// Statevector simulation is capped to keep memory bounded.
    #[error("qubit count {n_qubits} exceeds the statevector cap of {cap}")]
    TooManyQubits { n_qubits: usize, cap: usize },

    /// Exact grid quadrature is capped by the 3^M node count.
    #[error("grid quadrature over {m} causal-cone parameters exceeds the cap of {cap}")]
    GridTooLarge { m: usize, cap: usize },

    /// An observable string could not be parsed.
    #[error("invalid observable '{input}': {reason}")]
    InvalidObservable { input: String, reason: String },

    /// Requested quantity is not covered by a closed-form branch.
    #[error("no closed form covers {0}")]
    NotCovered(String),

    /// Monte Carlo estimation needs at least two samples.
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),

    /// Internal consistency check of the contraction engine failed.
    #[error("tensor-network self-validation failed: {0}")]
    SelfValidation(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
