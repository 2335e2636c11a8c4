use std::sync::OnceLock;

use rayon::prelude::*;

use super::element::{clifford_order_u128, CliffordElement};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rng::substream;

/// Largest qubit count for which the whole group is enumerated.
pub const MAX_ENUMERATED_QUBITS: usize = 2;

/// Dense matrices of every element, in index order (`n ≤ 2`, cached).
pub fn enumerate_dense(n: usize) -> Result<&'static [CMatrix]> {
    static ONE: OnceLock<Vec<CMatrix>> = OnceLock::new();
    static TWO: OnceLock<Vec<CMatrix>> = OnceLock::new();
    let cell = match n {
        1 => &ONE,
        2 => &TWO,
        _ => {
            return Err(Error::OutOfRange(format!(
                "full Clifford enumeration needs n ≤ {MAX_ENUMERATED_QUBITS}"
            )))
        }
    };
    Ok(cell.get_or_init(|| {
        let order = clifford_order_u128(n).expect("small n");
        (0..order)
            .into_par_iter()
            .map(|i| {
                CliffordElement::from_index(n, i)
                    .and_then(|c| c.to_dense())
                    .expect("valid index")
            })
            .collect()
    }))
}

/// Sample `j` of a Monte Carlo run uses the substream `(seed, j)`.
pub fn sample_dense(n: usize, samples: usize, seed: u64) -> Result<Vec<(u128, CMatrix)>> {
    clifford_order_u128(n)?;
    (0..samples)
        .into_par_iter()
        .map(|j| {
            let mut rng = substream(seed, j as u64);
            let c = CliffordElement::sample_with(n, &mut rng)?;
            Ok((c.index().expect("indexed"), c.to_dense()?))
        })
        .collect()
}

/// Sum `f(i)` over `0..count` in fixed-size chunks, combining the chunk
/// sums in order so the result does not depend on thread scheduling.
pub fn ordered_sum<F>(count: usize, zero: CMatrix, f: F) -> CMatrix
where
    F: Fn(usize) -> CMatrix + Sync,
{
    const CHUNK: usize = 64;
    let chunks = count.div_ceil(CHUNK);
    let partials: Vec<CMatrix> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = zero.clone();
            for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                acc += f(i);
            }
            acc
        })
        .collect();
    partials.into_iter().fold(zero, |acc, p| acc + p)
}
