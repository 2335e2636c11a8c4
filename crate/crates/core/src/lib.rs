//! Dense-matrix simulator for EFI pairs, pseudo-mixed and single-copy
//! pseudorandom states, Clifford-based randomness extractors and
//! net-Kolmogorov complexity measures at desk scale (up to a dozen qubits).

pub mod clifford;
pub mod error;
pub mod extractor;
pub mod family;
pub mod harness;
pub mod kolmogorov;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod qstate;
pub mod rng;

pub use error::{Error, Result};
