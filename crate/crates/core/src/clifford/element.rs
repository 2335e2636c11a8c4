use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::pauli::PauliString;
use super::symplectic::{
    is_symplectic, symplectic_from_index, symplectic_order, symplectic_to_index,
};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, ONE};
use crate::qstate::{RegisterLayout, UnitaryOperator};
use crate::rng::rng_from_seed;

/// Largest qubit count with a `u128` index space.
pub const MAX_INDEXED_QUBITS: usize = 7;
/// Largest qubit count accepted for dense conversion.
pub const MAX_DENSE_QUBITS: usize = 6;

/// Order of the Clifford group modulo global phase,
/// `2^{n²+2n} ∏_{j=1}^{n} (4^j − 1)`.
pub fn clifford_order(n: usize) -> BigUint {
    let mut order = BigUint::from(1u32) << (n * n + 2 * n);
    for j in 1..=n as u32 {
        order *= (BigUint::from(1u32) << (2 * j)) - BigUint::from(1u32);
    }
    order
}

/// [`clifford_order`] as `u128`, for `n ≤ 7`.
pub fn clifford_order_u128(n: usize) -> Result<u128> {
    if n == 0 || n > MAX_INDEXED_QUBITS {
        return Err(Error::OutOfRange(format!(
            "indexed Clifford groups need 1 ≤ n ≤ {MAX_INDEXED_QUBITS}"
        )));
    }
    Ok(symplectic_order(n) * (1u128 << (2 * n)))
}

/// `log₂` of the projective Clifford order.
pub fn log2_clifford_order(n: usize) -> f64 {
    clifford_order(n)
        .to_f64()
        .map(f64::log2)
        .unwrap_or(f64::INFINITY)
}

/// Clifford unitary, modulo global phase, stored by the images of the
/// Pauli generators: `images[2j]` is `C X_j C†`, `images[2j+1]` is `C Z_j C†`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordElement {
    n: usize,
    images: Vec<PauliString>,
    index: Option<u128>,
}

impl CliffordElement {
    pub fn identity(n: usize) -> Self {
        let images = (0..n)
            .flat_map(|j| [PauliString::single_x(j), PauliString::single_z(j)])
            .collect();
        Self {
            n,
            images,
            index: Some(0),
        }
    }

    /// Element from generator images; checks the commutation relations.
    pub fn from_images(n: usize, images: Vec<PauliString>) -> Result<Self> {
        if images.len() != 2 * n {
            return Err(Error::Dimension {
                expected: 2 * n,
                found: images.len(),
            });
        }
        if images.iter().any(|p| !p.is_hermitian()) {
            return Err(Error::InvalidState("non-Hermitian generator image".into()));
        }
        let rows: Vec<u64> = images.iter().map(|p| p.to_symplectic(n)).collect();
        if !is_symplectic(&rows, n) {
            return Err(Error::InvalidState(
                "generator images violate the symplectic condition".into(),
            ));
        }
        let mut c = Self {
            n,
            images,
            index: None,
        };
        c.index = c.compute_index();
        Ok(c)
    }

    /// Element with canonical index `idx < clifford_order(n)`. The index is
    /// `symplectic_index · 4^n + signs`, with bit `k` of `signs` the sign of
    /// generator image `k`.
    pub fn from_index(n: usize, idx: u128) -> Result<Self> {
        let order = clifford_order_u128(n)?;
        if idx >= order {
            return Err(Error::OutOfRange(format!("Clifford index {idx} ≥ {order}")));
        }
        let signs = idx % (1u128 << (2 * n));
        let rows = symplectic_from_index(idx >> (2 * n), n);
        let images = rows
            .iter()
            .enumerate()
            .map(|(k, &v)| PauliString::from_symplectic(v, n, (signs >> k) & 1 == 1))
            .collect();
        Ok(Self {
            n,
            images,
            index: Some(idx),
        })
    }

    fn compute_index(&self) -> Option<u128> {
        if self.n > MAX_INDEXED_QUBITS {
            return None;
        }
        let rows: Vec<u64> = self
            .images
            .iter()
            .map(|p| p.to_symplectic(self.n))
            .collect();
        let sym = symplectic_to_index(&rows, self.n)?;
        let signs: u128 = self
            .images
            .iter()
            .enumerate()
            .map(|(k, p)| (p.sign() as u128) << k)
            .sum();
        Some((sym << (2 * self.n)) + signs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    pub fn index(&self) -> Option<u128> {
        self.index
    }

    /// Symplectic rows of the tableau.
    pub fn symplectic_rows(&self) -> Vec<u64> {
        self.images
            .iter()
            .map(|p| p.to_symplectic(self.n))
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        is_symplectic(&self.symplectic_rows(), self.n)
            && self.images.iter().all(|p| p.is_hermitian())
    }

    /// `C P C†` for an arbitrary Pauli string `P`.
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        // i^e X^x Z^z ↦ i^e ∏_j C X_j C†^{x_j} ∏_j C Z_j C†^{z_j}
        let mut out = PauliString {
            x: 0,
            z: 0,
            phase: p.phase,
        };
        for j in 0..self.n {
            if (p.x >> j) & 1 == 1 {
                out = out.mul(&self.images[2 * j]);
            }
        }
        for j in 0..self.n {
            if (p.z >> j) & 1 == 1 {
                out = out.mul(&self.images[2 * j + 1]);
            }
        }
        out
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &CliffordElement) -> Result<Self> {
        if self.n != first.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: first.n,
            });
        }
        let images = first.images.iter().map(|p| self.conjugate(p)).collect();
        let mut c = Self {
            n: self.n,
            images,
            index: None,
        };
        c.index = c.compute_index();
        Ok(c)
    }

    /// Uniform sample: rejection sampling of `⌈log₂ order⌉`-bit integers.
    pub fn sample(n: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        Self::sample_with(n, &mut rng)
    }

    pub fn sample_with(n: usize, rng: &mut crate::rng::Rng) -> Result<Self> {
        let order = clifford_order_u128(n)?;
        let bits = 128 - (order - 1).leading_zeros();
        let mask = if bits >= 128 {
            u128::MAX
        } else {
            (1u128 << bits) - 1
        };
        loop {
            let candidate = rng.gen::<u128>() & mask;
            if candidate < order {
                return Self::from_index(n, candidate);
            }
        }
    }

    /// Dense unitary. Columns are `∏_j P_j^{b_j} |s⟩` where `P_j` is the image
    /// of `X_j` and `|s⟩` is the joint +1 eigenvector of the `Z_j` images;
    /// the global phase makes the first nonzero entry of column 0 positive.
    pub fn to_dense(&self) -> Result<CMatrix> {
        let n = self.n;
        if n > MAX_DENSE_QUBITS {
            return Err(Error::OutOfRange(format!(
                "dense Clifford on {n} > {MAX_DENSE_QUBITS} qubits"
            )));
        }
        let d = 1usize << n;
        let stab: Vec<PauliString> = (0..n).map(|j| self.images[2 * j + 1]).collect();
        let mut s = None;
        for b in 0..d {
            let mut v = CVector::from_element(d, C64::from(0.0));
            v[b] = ONE;
            for p in &stab {
                let pv = p.apply(n, &v);
                v = (v + pv).scale(0.5);
            }
            let norm = v.norm();
            if norm > 1e-6 {
                s = Some(v / C64::from(norm));
                break;
            }
        }
        let s = s.ok_or_else(|| Error::InvalidState("stabilizer projector vanished".into()))?;
        let mut u = CMatrix::zeros(d, d);
        for col in 0..d {
            let mut v = s.clone();
            // Basis index bit for qubit j is (n−1−j).
            for j in (0..n).rev() {
                if (col >> (n - 1 - j)) & 1 == 1 {
                    v = self.images[2 * j].apply(n, &v);
                }
            }
            u.set_column(col, &v);
        }
        if let Some(z) = u.column(0).iter().find(|z| z.norm() > 1e-9).copied() {
            let phase = z.conj() / z.norm();
            u *= phase;
        }
        Ok(u)
    }

    pub fn to_unitary(&self) -> Result<UnitaryOperator> {
        UnitaryOperator::new(RegisterLayout::single("C", self.n)?, self.to_dense()?)
    }

    /// One line per generator image, e.g. `X0 -> +XZ`.
    pub fn to_text(&self) -> String {
        let mut lines = Vec::new();
        for j in 0..self.n {
            lines.push(format!("X{j} -> {}", self.images[2 * j].label(self.n)));
            lines.push(format!("Z{j} -> {}", self.images[2 * j + 1].label(self.n)));
        }
        lines.join("\n")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        if lines.is_empty() || !lines.len().is_multiple_of(2) {
            return Err(Error::Config(
                "tableau text needs two lines per qubit".into(),
            ));
        }
        let n = lines.len() / 2;
        let mut images = vec![PauliString::identity(); 2 * n];
        let mut seen = vec![false; 2 * n];
        for line in lines {
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Config(format!("missing `->` in `{line}`")))?;
            let lhs = lhs.trim();
            let kind = lhs
                .chars()
                .next()
                .ok_or_else(|| Error::Config("empty generator".into()))?;
            let q: usize = lhs[1..]
                .parse()
                .map_err(|_| Error::Config(format!("bad generator `{lhs}`")))?;
            if q >= n {
                return Err(Error::Config(format!("generator qubit {q} out of range")));
            }
            let slot = match kind {
                'X' => 2 * q,
                'Z' => 2 * q + 1,
                _ => return Err(Error::Config(format!("bad generator `{lhs}`"))),
            };
            let (p, len) = PauliString::parse(rhs)?;
            if len != n {
                return Err(Error::Config(format!(
                    "image `{}` has wrong length",
                    rhs.trim()
                )));
            }
            images[slot] = p;
            seen[slot] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config("missing generator image".into()));
        }
        Self::from_images(n, images)
    }

    /// Hadamard on qubit `q`.
    pub fn hadamard(n: usize, q: usize) -> Self {
        let mut c = Self::identity(n);
        c.images[2 * q] = PauliString::single_z(q);
        c.images[2 * q + 1] = PauliString::single_x(q);
        c.index = c.compute_index();
        c
    }

    /// Phase gate on qubit `q`.
    pub fn phase(n: usize, q: usize) -> Self {
        let mut c = Self::identity(n);
        c.images[2 * q] = PauliString::hermitian(1 << q, 1 << q, false);
        c.index = c.compute_index();
        c
    }

    /// CNOT with the given control and target.
    pub fn cnot(n: usize, control: usize, target: usize) -> Self {
        let mut c = Self::identity(n);
        c.images[2 * control] = PauliString::hermitian((1 << control) | (1 << target), 0, false);
        c.images[2 * target + 1] = PauliString::hermitian(0, (1 << control) | (1 << target), false);
        c.index = c.compute_index();
        c
    }
}
