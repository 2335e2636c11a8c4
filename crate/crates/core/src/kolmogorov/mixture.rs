//! Truncated universal mixture over program outputs.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codec::{canonical_empty_code, enumerate_programs, Program, ProgramCode};
use crate::clifford::group::ordered_sum;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::qstate::{
    DensityOperator, PureState, RegisterLayout, SpectralDecomposition, RANK_CUTOFF,
};

/// Largest width for which the mixture is built.
pub const MAX_MIXTURE_QUBITS: usize = 8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProgramEntry {
    pub code: ProgramCode,
    pub program: Program,
    pub state: PureState,
    /// `2^{-|code|}`.
    pub weight: f64,
}

/// `μ = Σ_{|c| ≤ L} 2^{-|c|} |ψ_c⟩⟨ψ_c| + τ·I/2^n`, with `τ` the total
/// mass given to the tail.
#[derive(Debug, Serialize, Deserialize)]
pub struct UniversalMixture {
    pub n: usize,
    pub l_max: usize,
    pub tail_tau: f64,
    operator: DensityOperator,
    program_table: Vec<ProgramEntry>,
    #[serde(skip)]
    spectral: OnceLock<SpectralDecomposition>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureManifest {
    pub n: usize,
    pub l_max: usize,
    pub tail_tau: f64,
    pub trace: f64,
    pub kraft_sum: f64,
    pub rank: usize,
    pub program_count: usize,
    pub shortest_zero_code: String,
    pub shortest_zero_weight: f64,
}

/// Default tail mass `2^{-(L+1)}`.
pub fn default_tail(l_max: usize) -> f64 {
    (-(l_max as f64 + 1.0)).exp2()
}

pub fn build_universal_mixture(n: usize, l_max: usize) -> Result<UniversalMixture> {
    build_universal_mixture_with_tail(n, l_max, default_tail(l_max))
}

pub fn build_universal_mixture_with_tail(
    n: usize,
    l_max: usize,
    tail_tau: f64,
) -> Result<UniversalMixture> {
    if n == 0 || n > MAX_MIXTURE_QUBITS {
        return Err(Error::OutOfRange(format!(
            "mixture width {n} outside 1..={MAX_MIXTURE_QUBITS}"
        )));
    }
    if !(tail_tau >= 0.0 && tail_tau.is_finite()) {
        return Err(Error::OutOfRange(format!("tail mass {tail_tau}")));
    }
    let programs = enumerate_programs(n, l_max)?;
    let table: Vec<ProgramEntry> = programs
        .into_par_iter()
        .map(|(code, program)| {
            let state = program.run()?;
            let weight = (-(code.len() as f64)).exp2();
            Ok(ProgramEntry {
                code,
                program,
                state,
                weight,
            })
        })
        .collect::<Result<_>>()?;
    let d = 1usize << n;
    let mut m = ordered_sum(table.len(), CMatrix::zeros(d, d), |i| {
        linalg::outer(table[i].state.amplitudes()) * C64::from(table[i].weight)
    });
    for i in 0..d {
        m[(i, i)] += C64::from(tail_tau / d as f64);
    }
    let layout = RegisterLayout::single("A", n)?;
    Ok(UniversalMixture {
        n,
        l_max,
        tail_tau,
        operator: DensityOperator::from_trusted(layout, m, true),
        program_table: table,
        spectral: OnceLock::new(),
    })
}

impl UniversalMixture {
    /// Wraps an arbitrary positive operator with trace at most one; the
    /// program table is empty. Used to exercise the measures on planted
    /// instances.
    pub fn from_operator(matrix: CMatrix) -> Result<Self> {
        let d = matrix.nrows();
        if d < 2 || !d.is_power_of_two() || matrix.ncols() != d {
            return Err(Error::Dimension {
                expected: d.next_power_of_two().max(2),
                found: d,
            });
        }
        let n = d.trailing_zeros() as usize;
        let layout = RegisterLayout::single("A", n)?;
        let operator = DensityOperator::new_subnormalized(layout, matrix)?;
        Ok(UniversalMixture {
            n,
            l_max: 0,
            tail_tau: 0.0,
            operator,
            program_table: Vec::new(),
            spectral: OnceLock::new(),
        })
    }

    pub fn operator(&self) -> &DensityOperator {
        &self.operator
    }

    pub fn matrix(&self) -> &CMatrix {
        self.operator.matrix()
    }

    pub fn program_table(&self) -> &[ProgramEntry] {
        &self.program_table
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        self.spectral
            .get_or_init(|| SpectralDecomposition::of_matrix(self.operator.matrix()))
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(self.operator.matrix()).re
    }

    /// `Σ 2^{-|c|}` over the table.
    pub fn kraft_sum(&self) -> f64 {
        self.program_table.iter().map(|e| e.weight).sum()
    }

    pub fn manifest(&self) -> MixtureManifest {
        let zero = canonical_empty_code(self.n);
        MixtureManifest {
            n: self.n,
            l_max: self.l_max,
            tail_tau: self.tail_tau,
            trace: self.trace(),
            kraft_sum: self.kraft_sum(),
            rank: self.spectral().rank(RANK_CUTOFF * 1e-3),
            program_count: self.program_table.len(),
            shortest_zero_weight: (-(zero.len() as f64)).exp2(),
            shortest_zero_code: zero.to_string(),
        }
    }

    /// Entries with `|c| ≤ r`, in table order.
    pub fn entries_up_to(&self, r: usize) -> impl Iterator<Item = &ProgramEntry> {
        self.program_table.iter().filter(move |e| e.code.len() <= r)
    }

    pub(crate) fn check_state(&self, psi: &PureState) -> Result<()> {
        if psi.n_qubits() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: psi.n_qubits(),
            });
        }
        Ok(())
    }
}
