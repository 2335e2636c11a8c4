use serde::{Deserialize, Serialize};

use super::layout::RegisterLayout;
use super::unitary::UnitaryOperator;
use crate::error::{Error, Result};
use crate::linalg::{self, CVector, C64, ONE, ZERO};

/// Normalized state vector over a register layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    layout: RegisterLayout,
    amplitudes: CVector,
}

pub const NORM_TOL: f64 = 1e-9;

impl PureState {
    pub fn new(layout: RegisterLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::Dimension {
                expected: layout.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "state norm {norm} differs from 1"
            )));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Normalizes the given vector; fails on a zero vector.
    pub fn normalized(layout: RegisterLayout, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm < 1e-300 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(layout, amplitudes / C64::from(norm))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let d = layout.dim();
        if index >= d {
            return Err(Error::OutOfRange(format!("basis index {index} ≥ {d}")));
        }
        let mut v = CVector::from_element(d, ZERO);
        v[index] = ONE;
        Ok(Self {
            layout,
            amplitudes: v,
        })
    }

    /// `|0…0⟩` on a single register.
    pub fn zero(name: &str, qubits: usize) -> Result<Self> {
        Self::basis(RegisterLayout::single(name, qubits)?, 0)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self {
            layout,
            amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes),
        })
    }

    /// `U` applied to the named registers.
    pub fn apply_unitary<S: AsRef<str>>(
        &self,
        u: &UnitaryOperator,
        targets: &[S],
    ) -> Result<PureState> {
        let qubits = self.layout.qubits_of(targets)?;
        self.apply_on_qubits(u.matrix(), &qubits)
    }

    /// Matrix applied to absolute qubit positions.
    pub fn apply_on_qubits(&self, m: &linalg::CMatrix, qubits: &[usize]) -> Result<PureState> {
        if m.nrows() != 1usize << qubits.len() {
            return Err(Error::Dimension {
                expected: 1 << qubits.len(),
                found: m.nrows(),
            });
        }
        let mut v = self.amplitudes.clone();
        linalg::apply_to_slice(v.as_mut_slice(), self.n_qubits(), qubits, m);
        Ok(Self {
            layout: self.layout.clone(),
            amplitudes: v,
        })
    }

    /// Same amplitudes under a new layout of equal dimension.
    pub fn relabel(&self, layout: RegisterLayout) -> Result<PureState> {
        if layout.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: layout.dim(),
            });
        }
        Ok(Self {
            layout,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// Registers reordered; amplitudes permuted accordingly.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<PureState> {
        let layout = self.layout.reorder(order)?;
        let qubit_order = self.layout.qubits_of(order)?;
        let n = self.n_qubits();
        let v = CVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|i| self.amplitudes[linalg::permute_index(i, n, &qubit_order)]),
        );
        Ok(Self {
            layout,
            amplitudes: v,
        })
    }
}
