//! The universal EFI mixture `ρ_r`: the output of the decoded program on a
//! uniformly random `r`-bit string.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kolmogorov::enumerate_programs;
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::metrics::trace_distance;
use crate::qstate::{DensityOperator, RegisterLayout, RANK_CUTOFF};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniversalEfiMixture {
    pub n: usize,
    pub r: usize,
    pub gate_cap: usize,
    pub operator: DensityOperator,
    /// Programs contributing their own output.
    pub program_count: usize,
    /// Weight left on `|0^n⟩`: strings without a decodable prefix, programs
    /// on more than `n` qubits and programs over the gate cap.
    pub canonical_weight: f64,
}

impl UniversalEfiMixture {
    pub fn rank(&self) -> usize {
        self.operator.spectral().rank(RANK_CUTOFF)
    }

    /// `log₂ rank`.
    pub fn max_entropy(&self) -> f64 {
        (self.rank().max(1) as f64).log2()
    }

    /// `D(ρ_r, I/2^n)`.
    pub fn distance_to_uniform(&self) -> Result<f64> {
        trace_distance(
            &self.operator,
            &DensityOperator::maximally_mixed(self.operator.layout().clone()),
        )
    }
}

/// A string `s ∈ {0,1}^r` whose prefix `c` decodes to a program contributes
/// that program's output, zero-padded to `n` qubits; prefix-freeness gives
/// `2^{r−|c|}` such strings, so each program carries weight `2^{−|c|}`.
pub fn universal_efi_mixture(n: usize, r: usize, gate_cap: usize) -> Result<UniversalEfiMixture> {
    let layout = RegisterLayout::single("A", n)?;
    let d = layout.dim();
    let mut acc = CMatrix::zeros(d, d);
    let mut used = 0.0;
    let mut program_count = 0;
    for width in 1..=n {
        for (code, program) in enumerate_programs(width, r)? {
            if program.gates.len() > gate_cap {
                continue;
            }
            let w = 0.5f64.powi(code.len() as i32);
            let mut v = program.run()?.amplitudes().clone();
            if width < n {
                let mut zero = CVector::from_element(1 << (n - width), C64::from(0.0));
                zero[0] = C64::from(1.0);
                v = linalg::kron_vec(&v, &zero);
            }
            acc += linalg::outer(&v) * C64::from(w);
            used += w;
            program_count += 1;
        }
    }
    if used > 1.0 + 1e-12 {
        return Err(Error::InvalidState(format!(
            "program weights sum to {used}"
        )));
    }
    let canonical_weight = (1.0 - used).max(0.0);
    acc[(0, 0)] += C64::from(canonical_weight);
    Ok(UniversalEfiMixture {
        n,
        r,
        gate_cap,
        operator: DensityOperator::new(layout, acc)?,
        program_count,
        canonical_weight,
    })
}
