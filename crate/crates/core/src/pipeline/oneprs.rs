//! Single-copy pseudorandom states from a pseudo-mixed state generator:
//! purify, Clifford on the purifying half, one-time pad on its tail.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generator::GeneratorSpec;
use crate::clifford::element::MAX_DENSE_QUBITS;
use crate::clifford::{clifford_order_u128, log2_clifford_order, otp::pauli_otp, CliffordElement};
use crate::error::{Error, Result};
use crate::family::{FamilyKind, FamilySpec};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::metrics::distance::trace_distance_matrices;
use crate::qstate::{DensityOperator, PureState, RegisterLayout};
use crate::rng::{substream, Rng};

/// `whole + log_l · log₂|L|` bits, kept symbolic so the `log|L|` terms
/// cancel exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearBits {
    pub whole: i64,
    pub log_l: i64,
}

impl LinearBits {
    pub fn value(&self, log_l: f64) -> f64 {
        self.whole as f64 + self.log_l as f64 * log_l
    }
}

impl std::ops::Sub for LinearBits {
    type Output = LinearBits;
    fn sub(self, o: LinearBits) -> LinearBits {
        LinearBits {
            whole: self.whole - o.whole,
            log_l: self.log_l - o.log_l,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchLedger {
    pub n: usize,
    pub n_prime: usize,
    pub m: usize,
    pub ell: usize,
    /// `log₂` of the Clifford group order on `n'·m` qubits.
    pub log_l: f64,
    pub key_bits: LinearBits,
    pub output_qubits: LinearBits,
    pub stretch: LinearBits,
}

impl StretchLedger {
    pub fn new(n: usize, n_prime: usize, m: usize, ell: usize) -> Self {
        let key_bits = LinearBits {
            whole: 2 * (n_prime * m) as i64 - 2 * ell as i64,
            log_l: 1,
        };
        let output_qubits = LinearBits {
            whole: ((n + n_prime) * m) as i64,
            log_l: 1,
        };
        Self {
            n,
            n_prime,
            m,
            ell,
            log_l: log2_clifford_order(n_prime * m),
            key_bits,
            output_qubits,
            stretch: output_qubits - key_bits,
        }
    }

    /// `(n − n')·m + 2ℓ`.
    pub fn closed_form(&self) -> i64 {
        (self.n as i64 - self.n_prime as i64) * self.m as i64 + 2 * self.ell as i64
    }

    /// Exact stretch; `None` if a `log|L|` term survived.
    pub fn exact_stretch(&self) -> Option<i64> {
        (self.stretch.log_l == 0).then_some(self.stretch.whole)
    }
}

/// `⌊(n' − n)·m/2 + 1⌋`.
pub fn default_ell(n: usize, n_prime: usize, m: usize) -> usize {
    (((n_prime - n) * m) / 2) + 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrsKey {
    pub clifford: u128,
    pub alpha: Vec<bool>,
    pub beta: Vec<bool>,
}

/// Key-to-state evaluator. States live on `A (n·m) ⊗ B1 (ℓ) ⊗ B2 (n'm − ℓ)`;
/// the classical index register is returned alongside.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OnePrs {
    pub ledger: StretchLedger,
    /// `|Ψ⟩^⊗m` with registers regrouped as `A^m B^m`.
    pub base: PureState,
}

/// Uses `ℓ = ⌊(n' − n)m/2 + 1⌋`.
pub fn one_prs_from_pms(pms: &GeneratorSpec, m: usize) -> Result<OnePrs> {
    let (n, n_prime) = widths(pms)?;
    one_prs_with_ell(pms, m, default_ell(n, n_prime, m))
}

fn widths(pms: &GeneratorSpec) -> Result<(usize, usize)> {
    let n = pms.output_qubits();
    let t = pms.n_qubits() - n;
    Ok((n, t.max(n)))
}

pub fn one_prs_with_ell(pms: &GeneratorSpec, m: usize, ell: usize) -> Result<OnePrs> {
    if m == 0 {
        return Err(Error::OutOfRange("m = 0".into()));
    }
    let g = pms.output_first()?;
    let (n, n_prime) = widths(&g)?;
    let nb = n_prime * m;
    if ell == 0 || ell > nb {
        return Err(Error::OutOfRange(format!("ℓ = {ell} outside [1, {nb}]")));
    }
    if nb > MAX_DENSE_QUBITS {
        return Err(Error::OutOfRange(format!(
            "Clifford on {nb} > {MAX_DENSE_QUBITS} qubits"
        )));
    }
    let total = (n + n_prime) * m;
    // |Ψ⟩ on A ⊗ B, with B padded by |0⟩ up to n' qubits when the generator
    // traces fewer qubits than it outputs.
    let mut psi = g.purification()?.amplitudes().clone();
    let t = g.n_qubits() - n;
    if n_prime > t {
        let mut zero = CVector::from_element(1 << (n_prime - t), C64::from(0.0));
        zero[0] = C64::from(1.0);
        psi = linalg::kron_vec(&psi, &zero);
    }
    let mut amps = CVector::from_element(1, C64::from(1.0));
    for _ in 0..m {
        amps = linalg::kron_vec(&amps, &psi);
    }
    // Copy c holds A at qubits c(n+n')..c(n+n')+n and B right after.
    let mut order = Vec::with_capacity(total);
    for c in 0..m {
        order.extend(c * (n + n_prime)..c * (n + n_prime) + n);
    }
    for c in 0..m {
        order.extend(c * (n + n_prime) + n..(c + 1) * (n + n_prime));
    }
    let regrouped = CVector::from_iterator(
        1 << total,
        (0..1usize << total).map(|i| amps[linalg::permute_index(i, total, &order)]),
    );
    let mut regs: Vec<(&str, usize)> = vec![("A", n * m), ("B1", ell)];
    if nb > ell {
        regs.push(("B2", nb - ell));
    }
    let base = PureState::new(RegisterLayout::new(regs)?, regrouped)?;
    Ok(OnePrs {
        ledger: StretchLedger::new(n, n_prime, m, ell),
        base,
    })
}

impl OnePrs {
    fn nb(&self) -> usize {
        self.ledger.n_prime * self.ledger.m
    }

    fn b_qubits(&self) -> Vec<usize> {
        let na = self.ledger.n * self.ledger.m;
        (na..na + self.nb()).collect()
    }

    /// Length of each pad key.
    pub fn pad_len(&self) -> usize {
        self.nb() - self.ledger.ell
    }

    pub fn zero_key(&self) -> PrsKey {
        PrsKey {
            clifford: 0,
            alpha: vec![false; self.pad_len()],
            beta: vec![false; self.pad_len()],
        }
    }

    pub fn sample_key(&self, rng: &mut Rng) -> Result<PrsKey> {
        let c = CliffordElement::sample_with(self.nb(), rng)?;
        let k = self.pad_len();
        let alpha = (0..k).map(|_| rng.gen::<bool>()).collect();
        let beta = (0..k).map(|_| rng.gen::<bool>()).collect();
        Ok(PrsKey {
            clifford: c.index().expect("indexed"),
            alpha,
            beta,
        })
    }

    /// `Tr_{B2}(C σ C†)` on `A ⊗ B1`, with `σ = |Ψ⟩⟨Ψ|^⊗m`.
    fn clifford_state(&self, clifford: u128) -> Result<PureState> {
        let u = CliffordElement::from_index(self.nb(), clifford)?.to_dense()?;
        self.base.apply_on_qubits(&u, &self.b_qubits())
    }

    /// `(index, |φ_k⟩)`.
    pub fn evaluate(&self, key: &PrsKey) -> Result<(u128, PureState)> {
        let order = clifford_order_u128(self.nb())?;
        if key.clifford >= order
            || key.alpha.len() != self.pad_len()
            || key.beta.len() != self.pad_len()
        {
            return Err(Error::OutOfRange("key outside the key space".into()));
        }
        let mut state = self.clifford_state(key.clifford)?;
        if self.pad_len() > 0 {
            state = pauli_otp(&state, &key.alpha, &key.beta, &["B2"])?;
        }
        Ok((key.clifford, state))
    }

    /// `ρ_A^⊗m ⊗ I_B/2^{n'm}`, the key average with the index traced out.
    pub fn closed_form_average(&self) -> Result<DensityOperator> {
        let rho = DensityOperator::from_pure(&self.base);
        let a = rho.partial_trace(&["A"])?;
        let db = 1usize << self.nb();
        let m = linalg::kron(a.matrix(), &linalg::identity(db).scale(1.0 / db as f64));
        DensityOperator::new(self.base.layout().clone(), m)
    }

    /// Exact pad average for one Clifford against
    /// `Tr_{B2}(C σ C†) ⊗ I_{B2}/|B2|`; returns the largest entry deviation.
    pub fn otp_identity_residual(&self, clifford: u128) -> Result<f64> {
        let k = self.pad_len();
        if k == 0 {
            return Ok(0.0);
        }
        if k > 6 {
            return Err(Error::OutOfRange(format!(
                "pad enumeration over {k} qubits"
            )));
        }
        let d = self.base.dim();
        let mut acc = CMatrix::zeros(d, d);
        for key in 0..1usize << (2 * k) {
            let alpha: Vec<bool> = (0..k).map(|j| (key >> j) & 1 == 1).collect();
            let beta: Vec<bool> = (0..k).map(|j| (key >> (k + j)) & 1 == 1).collect();
            let (_, phi) = self.evaluate(&PrsKey {
                clifford,
                alpha,
                beta,
            })?;
            acc += linalg::outer(phi.amplitudes());
        }
        acc /= C64::from((1usize << (2 * k)) as f64);
        let c = self.clifford_state(clifford)?;
        let n = c.n_qubits();
        let keep: Vec<usize> = (0..n - k).collect();
        let reduced = linalg::reduced_from_vector(c.amplitudes().as_slice(), n, &keep);
        let target = linalg::kron(
            &reduced,
            &linalg::identity(1 << k).scale(1.0 / (1u64 << k) as f64),
        );
        Ok(linalg::max_abs(&(acc - target)))
    }

    /// Average of `|φ_k⟩⟨φ_k|` over `keys` sampled keys (key `j` from
    /// substream `j`), compared with [`closed_form_average`](Self::closed_form_average).
    pub fn monte_carlo_average(&self, keys: usize, seed: u64) -> Result<MonteCarloAverage> {
        if keys < 2 {
            return Err(Error::OutOfRange(
                "Monte Carlo average needs two keys".into(),
            ));
        }
        let d = self.base.dim();
        let outers: Vec<CMatrix> = (0..keys)
            .into_par_iter()
            .map(|j| {
                let mut rng = substream(seed, j as u64);
                let key = self.sample_key(&mut rng)?;
                Ok(linalg::outer(self.evaluate(&key)?.1.amplitudes()))
            })
            .collect::<Result<_>>()?;
        let kf = keys as f64;
        let mut mean = CMatrix::zeros(d, d);
        for o in &outers {
            mean += o;
        }
        mean /= C64::from(kf);
        let mut var_sum = 0.0;
        for o in &outers {
            var_sum += (o - &mean).iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        var_sum /= kf - 1.0;
        // ½‖X‖₁ ≤ ½√d‖X‖_F, and E‖mean − E‖²_F = Σ var_ij / K.
        let standard_error = 0.5 * (d as f64).sqrt() * (var_sum / kf).sqrt();
        let closed = self.closed_form_average()?;
        Ok(MonteCarloAverage {
            keys,
            distance: trace_distance_matrices(&mean, closed.matrix()),
            standard_error,
        })
    }

    /// `count` sampled keys as a samplable family (index register dropped).
    pub fn sample_family(&self, count: usize, seed: u64) -> Result<FamilySpec> {
        let states = (0..count)
            .map(|j| {
                let key = self.sample_key(&mut substream(seed, j as u64))?;
                Ok((self.evaluate(&key)?.1, None))
            })
            .collect::<Result<Vec<_>>>()?;
        FamilySpec::uniform(
            "one_prs",
            FamilyKind::Samplable,
            self.base.n_qubits(),
            states,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloAverage {
    pub keys: usize,
    /// Trace distance of the sample mean to the closed-form average.
    pub distance: f64,
    /// Frobenius-based bound on the standard error of that distance.
    pub standard_error: f64,
}
