//! Clifford group: tableaus, canonical indexing, dense conversion, design
//! moments and the Pauli one-time pad.

pub mod design;
pub mod element;
pub mod group;
pub mod otp;
pub mod pauli;
pub mod symplectic;

pub use design::{haar_twirl, two_design_moment_error, DesignMomentReport, SamplingMode};
pub use element::{clifford_order, clifford_order_u128, log2_clifford_order, CliffordElement};
pub use group::{enumerate_dense, sample_dense};
pub use otp::{otp_average, pauli_otp};
pub use pauli::PauliString;

use crate::error::Result;
use crate::qstate::UnitaryOperator;

pub fn index_to_clifford(n: usize, idx: u128) -> Result<CliffordElement> {
    CliffordElement::from_index(n, idx)
}

pub fn sample_clifford(n: usize, seed: u64) -> Result<CliffordElement> {
    CliffordElement::sample(n, seed)
}

pub fn clifford_to_dense(c: &CliffordElement) -> Result<UnitaryOperator> {
    c.to_unitary()
}
