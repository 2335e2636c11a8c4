use super::pauli::PauliString;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qstate::{DensityOperator, QuantumState};

/// `X^α Z^β` on `k` qubits (bit `j` of each slice acts on target `j`).
pub fn pad_matrix(alpha: &[bool], beta: &[bool]) -> Result<CMatrix> {
    if alpha.len() != beta.len() {
        return Err(Error::Dimension {
            expected: alpha.len(),
            found: beta.len(),
        });
    }
    let k = alpha.len();
    let x: u64 = alpha
        .iter()
        .enumerate()
        .map(|(j, &b)| (b as u64) << j)
        .sum();
    let z: u64 = beta.iter().enumerate().map(|(j, &b)| (b as u64) << j).sum();
    Ok(PauliString { x, z, phase: 0 }.to_matrix(k))
}

/// Quantum one-time pad `X^α Z^β` on the named target registers.
pub fn pauli_otp<T: QuantumState, S: AsRef<str>>(
    state: &T,
    alpha: &[bool],
    beta: &[bool],
    targets: &[S],
) -> Result<T> {
    let qubits = state.layout().qubits_of(targets)?;
    if alpha.len() != qubits.len() || beta.len() != qubits.len() {
        return Err(Error::Dimension {
            expected: qubits.len(),
            found: alpha.len().max(beta.len()),
        });
    }
    state.act_on_qubits(&pad_matrix(alpha, beta)?, &qubits)
}

/// Average of the padded state over all `4^k` keys.
pub fn otp_average<S: AsRef<str>>(rho: &DensityOperator, targets: &[S]) -> Result<DensityOperator> {
    let qubits = rho.layout().qubits_of(targets)?;
    let k = qubits.len();
    if k > 8 {
        return Err(Error::OutOfRange(format!(
            "full pad enumeration over {k} qubits"
        )));
    }
    let d = rho.dim();
    let mut acc = CMatrix::zeros(d, d);
    for key in 0..1usize << (2 * k) {
        let alpha: Vec<bool> = (0..k).map(|j| (key >> j) & 1 == 1).collect();
        let beta: Vec<bool> = (0..k).map(|j| (key >> (k + j)) & 1 == 1).collect();
        acc += rho
            .act_on_qubits(&pad_matrix(&alpha, &beta)?, &qubits)?
            .matrix();
    }
    let scale = 1.0 / (1usize << (2 * k)) as f64;
    if rho.is_subnormalized() {
        DensityOperator::new_subnormalized(rho.layout().clone(), acc.scale(scale))
    } else {
        DensityOperator::new(rho.layout().clone(), acc.scale(scale))
    }
}
