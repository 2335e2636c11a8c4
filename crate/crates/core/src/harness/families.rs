//! Inputs shared by the suites and the commands.

use crate::error::Result;
use crate::family::{FamilyKind, FamilySpec, Side};
use crate::kolmogorov::enumerate_programs;
use crate::qstate::{haar_unitary, sample_haar_state, DensityOperator, PureState, RegisterLayout};
use crate::rng::{substream_seed, Rng};

/// `I/2^k ⊗ |0⟩⟨0|` on `n` qubits of register `A`, conjugated by a Haar
/// unitary: min-entropy exactly `k`.
pub fn planted_min_entropy(n: usize, k: usize, rng: &mut Rng) -> Result<DensityOperator> {
    let layout = RegisterLayout::single("A", n)?;
    let mut diag = vec![0.0; 1 << n];
    for d in diag.iter_mut().take(1 << k.min(n)) {
        *d = 1.0 / (1usize << k.min(n)) as f64;
    }
    let u = haar_unitary(layout.clone(), rng)?;
    DensityOperator::diagonal(layout, &diag)?.apply_unitary(&u, &["A"])
}

/// Code-length cap of the low half of the toy family.
pub const TOY_LOW_CAP: usize = 13;
pub const TOY_N: usize = 4;
pub const TOY_HAAR: usize = 8;

/// Four-qubit planted family: every program with a code of at most 13 bits
/// (low half) and eight Haar states (high half).
pub fn toy_family(seed: u64) -> Result<FamilySpec> {
    let mut states: Vec<(PureState, Option<Side>)> = enumerate_programs(TOY_N, TOY_LOW_CAP)?
        .into_iter()
        .map(|(_, p)| Ok((p.run()?, Some(Side::Low))))
        .collect::<Result<_>>()?;
    for j in 0..TOY_HAAR {
        states.push((
            sample_haar_state(TOY_N, substream_seed(seed, 900 + j as u64))?,
            Some(Side::High),
        ));
    }
    FamilySpec::uniform("toy", FamilyKind::Samplable, TOY_N, states)
}

/// `count` Haar states on `n` qubits with alternating planted labels.
pub fn haar_family(n: usize, count: usize, seed: u64) -> Result<FamilySpec> {
    let states = (0..count)
        .map(|j| {
            let side = if j % 2 == 0 { Side::Low } else { Side::High };
            Ok((
                sample_haar_state(n, substream_seed(seed, j as u64))?,
                Some(side),
            ))
        })
        .collect::<Result<_>>()?;
    FamilySpec::uniform("haar", FamilyKind::Samplable, n, states)
}

/// Every program on `n` qubits with a code of at most `cap` bits.
pub fn low_family(n: usize, cap: usize) -> Result<FamilySpec> {
    let states = enumerate_programs(n, cap)?
        .into_iter()
        .map(|(_, p)| Ok((p.run()?, Some(Side::Low))))
        .collect::<Result<_>>()?;
    FamilySpec::uniform("low", FamilyKind::Keyed, n, states)
}
