//! Gradient-variance analysis for tensor-network-inspired parameterized
//! quantum circuits.
//!
//! The crate computes `Var[∂_{j,k}⟨H⟩]` — the variance, over uniformly random
//! angles `θ ∈ [-π, π]^M`, of the parameter-shift gradient of an expectation
//! value — for three circuit families (qMPS, qTTN, qMERA) in three mutually
//! independent ways:
//!
//! * [`zx`] — exact contraction of the variance tensor network obtained by
//!   averaging the doubled circuit, swept over the observable's causal cone;
//! * [`closed_form`] — direct evaluation of the known closed-form branches,
//!   transfer-matrix recursions and bounds;
//! * [`oracle`] — brute force on a dense statevector: Monte Carlo sampling
//!   and an exact trigonometric-grid quadrature.
//!
//! Agreement between the three paths on overlapping instances is the crate's
//! core correctness argument; the `acceptance` integration test exercises it
//! end to end.

pub mod circuit;
pub mod closed_form;
pub mod error;
pub mod oracle;
pub mod zx;

pub use error::{Error, Result};
