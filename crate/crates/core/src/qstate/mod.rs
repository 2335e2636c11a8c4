//! Registers, pure and (semi-)density operators, unitaries and the basic
//! operations on them.

pub mod density;
pub mod dump;
pub mod haar;
pub mod layout;
pub mod pure;
pub mod spectral;
pub mod unitary;

pub use density::DensityOperator;
pub use haar::{haar_unitary, random_density, random_mixed, sample_haar_state};
pub use layout::{max_qubits, RegisterLayout};
pub use pure::PureState;
pub use spectral::SpectralDecomposition;
pub use unitary::{gates, UnitaryOperator};

use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};

/// Eigenvalue cutoff used for ranks and supports.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Name of the purifying register added by [`purify`].
pub const PURIFIER: &str = "P";

/// Canonical purification `Σ_i √λ_i |v_i⟩|i⟩` of a normalized operator.
/// The purifying register is named `P` and has `⌈log₂ rank⌉` qubits
/// (at least one); eigenvalues are taken in descending order and every
/// degenerate eigenspace uses its canonical basis.
pub fn purify(rho: &DensityOperator) -> Result<PureState> {
    purify_named(rho, PURIFIER)
}

pub fn purify_named(rho: &DensityOperator, purifier: &str) -> Result<PureState> {
    if rho.is_subnormalized() {
        return Err(Error::InvalidState(
            "purification needs a normalized operator".into(),
        ));
    }
    let spec = SpectralDecomposition::canonical(rho.matrix());
    let rank = spec.rank(RANK_CUTOFF).max(1);
    let b = (usize::BITS - (rank - 1).leading_zeros()).max(1) as usize;
    let layout = rho.layout().concat(&RegisterLayout::single(purifier, b)?)?;
    let db = 1usize << b;
    let mut amps = CVector::from_element(rho.dim() * db, C64::from(0.0));
    let mut norm2 = 0.0;
    for i in 0..rank {
        let w = spec.eigenvalues[i].max(0.0);
        norm2 += w;
        let s = w.sqrt();
        for a in 0..rho.dim() {
            amps[a * db + i] = spec.eigenvectors[(a, i)] * s;
        }
    }
    let amps = amps / C64::from(norm2.sqrt());
    PureState::new(layout, amps)
}

/// `a ⊗ b`.
pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    a.tensor(b)
}

pub fn partial_trace<S: AsRef<str>>(rho: &DensityOperator, keep: &[S]) -> Result<DensityOperator> {
    rho.partial_trace(keep)
}

pub fn spectral(rho: &DensityOperator) -> SpectralDecomposition {
    rho.spectral()
}

/// Common interface of pure and density states for unitary action.
pub trait QuantumState: Sized {
    fn layout(&self) -> &RegisterLayout;
    /// Apply `u` (a `2^k`-dimensional matrix) to absolute qubit positions.
    fn act_on_qubits(&self, u: &crate::linalg::CMatrix, qubits: &[usize]) -> Result<Self>;
}

impl QuantumState for PureState {
    fn layout(&self) -> &RegisterLayout {
        PureState::layout(self)
    }
    fn act_on_qubits(&self, u: &crate::linalg::CMatrix, qubits: &[usize]) -> Result<Self> {
        self.apply_on_qubits(u, qubits)
    }
}

impl QuantumState for DensityOperator {
    fn layout(&self) -> &RegisterLayout {
        DensityOperator::layout(self)
    }
    fn act_on_qubits(&self, u: &crate::linalg::CMatrix, qubits: &[usize]) -> Result<Self> {
        self.apply_on_qubits(u, qubits)
    }
}

/// `U` applied to the named registers of a pure or density state.
pub fn apply_unitary<T: QuantumState, S: AsRef<str>>(
    state: &T,
    u: &UnitaryOperator,
    targets: &[S],
) -> Result<T> {
    let qubits = state.layout().qubits_of(targets)?;
    if u.n_qubits() != qubits.len() {
        return Err(Error::Dimension {
            expected: qubits.len(),
            found: u.n_qubits(),
        });
    }
    state.act_on_qubits(u.matrix(), &qubits)
}
