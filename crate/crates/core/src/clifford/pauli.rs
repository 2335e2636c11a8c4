use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CVector, C64, I, ONE};

/// `i^phase · X^x Z^z`, where bit `j` of `x`/`z` refers to qubit `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

impl PauliString {
    pub fn identity() -> Self {
        Self {
            x: 0,
            z: 0,
            phase: 0,
        }
    }

    /// Hermitian Pauli `(−1)^sign · i^{|x∧z|} X^x Z^z` (so that `x=z=1` is `Y`).
    pub fn hermitian(x: u64, z: u64, sign: bool) -> Self {
        let phase = ((2 * sign as u32 + (x & z).count_ones()) % 4) as u8;
        Self { x, z, phase }
    }

    pub fn single_x(q: usize) -> Self {
        Self::hermitian(1 << q, 0, false)
    }

    pub fn single_z(q: usize) -> Self {
        Self::hermitian(0, 1 << q, false)
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + (self.x & self.z).count_ones()).is_multiple_of(2)
    }

    /// Sign of a Hermitian Pauli relative to its canonical form.
    pub fn sign(&self) -> bool {
        debug_assert!(self.is_hermitian());
        ((self.phase as u32 + 4 - (self.x & self.z).count_ones() % 4) % 4) == 2
    }

    /// Product `self · other`.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        // X^a Z^b X^c Z^d = (−1)^{b·c} X^{a⊕c} Z^{b⊕d}
        let swap = 2 * (self.z & other.x).count_ones();
        Self {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: ((self.phase as u32 + other.phase as u32 + swap) % 4) as u8,
        }
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Interleaved symplectic vector: bit `2j` is `x_j`, bit `2j+1` is `z_j`.
    pub fn to_symplectic(&self, n: usize) -> u64 {
        let mut v = 0u64;
        for j in 0..n {
            v |= ((self.x >> j) & 1) << (2 * j);
            v |= ((self.z >> j) & 1) << (2 * j + 1);
        }
        v
    }

    pub fn from_symplectic(v: u64, n: usize, sign: bool) -> Self {
        let (mut x, mut z) = (0u64, 0u64);
        for j in 0..n {
            x |= ((v >> (2 * j)) & 1) << j;
            z |= ((v >> (2 * j + 1)) & 1) << j;
        }
        Self::hermitian(x, z, sign)
    }

    /// Applies the Pauli to a state vector on `n` qubits.
    pub fn apply(&self, n: usize, v: &CVector) -> CVector {
        let (xm, zm) = (basis_mask(self.x, n), basis_mask(self.z, n));
        let global = phase_factor(self.phase);
        let mut out = CVector::from_element(v.len(), C64::from(0.0));
        for b in 0..v.len() {
            let sign = if (zm & b as u64).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            out[b ^ xm as usize] = v[b] * global * sign;
        }
        out
    }

    /// Dense matrix of the Pauli.
    pub fn to_matrix(&self, n: usize) -> crate::linalg::CMatrix {
        let d = 1usize << n;
        let mut m = crate::linalg::CMatrix::zeros(d, d);
        for b in 0..d {
            let mut e = CVector::from_element(d, C64::from(0.0));
            e[b] = ONE;
            m.set_column(b, &self.apply(n, &e));
        }
        m
    }

    /// Letters `I X Y Z` for qubits `0..n` with a leading sign; the string
    /// must be Hermitian.
    pub fn label(&self, n: usize) -> String {
        let mut s = String::from(if self.sign() { "-" } else { "+" });
        for j in 0..n {
            let (x, z) = ((self.x >> j) & 1, (self.z >> j) & 1);
            s.push(match (x, z) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (1, 1) => 'Y',
                _ => 'Z',
            });
        }
        s
    }

    pub fn parse(label: &str) -> Result<(Self, usize)> {
        let label = label.trim();
        let (sign, body) = match label.chars().next() {
            Some('+') => (false, &label[1..]),
            Some('-') => (true, &label[1..]),
            _ => (false, label),
        };
        let (mut x, mut z) = (0u64, 0u64);
        let mut n = 0;
        for (j, ch) in body.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => x |= 1 << j,
                'Y' => {
                    x |= 1 << j;
                    z |= 1 << j
                }
                'Z' => z |= 1 << j,
                other => return Err(Error::Config(format!("bad Pauli letter `{other}`"))),
            }
            n = j + 1;
        }
        Ok((Self::hermitian(x, z, sign), n))
    }
}

/// Qubit-indexed mask converted to a big-endian basis-index mask.
pub fn basis_mask(mask: u64, n: usize) -> u64 {
    let mut out = 0u64;
    for j in 0..n {
        if (mask >> j) & 1 == 1 {
            out |= 1 << (n - 1 - j);
        }
    }
    out
}

pub fn phase_factor(phase: u8) -> C64 {
    match phase % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// Symplectic inner product of interleaved vectors.
pub fn symplectic_inner(v: u64, w: u64) -> bool {
    const EVEN: u64 = 0x5555_5555_5555_5555;
    let (vx, vz) = (v & EVEN, (v >> 1) & EVEN);
    let (wx, wz) = (w & EVEN, (w >> 1) & EVEN);
    ((vx & wz).count_ones() + (wx & vz).count_ones()) % 2 == 1
}
