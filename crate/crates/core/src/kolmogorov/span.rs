//! Projectors onto spans of low-complexity states.

use serde::{Deserialize, Serialize};

use super::mixture::UniversalMixture;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::qstate::PureState;

/// Singular values below this are dropped when orthonormalizing.
pub const SPAN_CUTOFF: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpanKind {
    /// Span of program outputs with code length at most `r`.
    Plain { r: usize },
    /// Eigenvectors of the family average with eigenvalue at least `γ/L`.
    Robust { gamma: f64, members: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpanProjector {
    pub kind: SpanKind,
    pub n: usize,
    pub rank: usize,
    #[serde(skip)]
    pub basis: CMatrix,
    /// Kept eigenvalues (robust) or generating codes (plain).
    pub provenance: Vec<String>,
}

impl SpanProjector {
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `⟨ψ|Π|ψ⟩`.
    pub fn weight(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.basis.nrows() {
            return Err(Error::Dimension {
                expected: self.basis.nrows(),
                found: psi.dim(),
            });
        }
        Ok((self.basis.adjoint() * psi.amplitudes()).norm_squared())
    }
}

pub fn span_projector(mu: &UniversalMixture, r: usize) -> Result<SpanProjector> {
    if r > mu.l_max {
        return Err(Error::OutOfRange(format!(
            "span length {r} beyond the table cap {}",
            mu.l_max
        )));
    }
    let entries: Vec<_> = mu.entries_up_to(r).collect();
    let d = 1usize << mu.n;
    let mut m = CMatrix::zeros(d, entries.len());
    for (j, e) in entries.iter().enumerate() {
        m.set_column(j, e.state.amplitudes());
    }
    let basis = linalg::column_span(&m, SPAN_CUTOFF);
    Ok(SpanProjector {
        kind: SpanKind::Plain { r },
        n: mu.n,
        rank: basis.ncols(),
        basis,
        provenance: entries.iter().map(|e| e.code.to_string()).collect(),
    })
}

/// Projector onto eigenvectors of `(1/L) Σ |ψ_k⟩⟨ψ_k|` with eigenvalue at
/// least `γ/L`. An empty family, or one with nothing above the threshold,
/// gives the zero projector.
pub fn robust_span_projector(n: usize, states: &[PureState], gamma: f64) -> Result<SpanProjector> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::OutOfRange(format!(
            "robustness {gamma} outside (0, 1]"
        )));
    }
    let d = 1usize << n;
    let l = states.len();
    let empty = |provenance| SpanProjector {
        kind: SpanKind::Robust { gamma, members: l },
        n,
        rank: 0,
        basis: CMatrix::zeros(d, 0),
        provenance,
    };
    if l == 0 {
        return Ok(empty(Vec::new()));
    }
    let mut avg = CMatrix::zeros(d, d);
    for s in states {
        if s.dim() != d {
            return Err(Error::Dimension {
                expected: d,
                found: s.dim(),
            });
        }
        avg += linalg::outer(s.amplitudes());
    }
    avg *= C64::from(1.0 / l as f64);
    let (vals, vecs) = linalg::hermitian_eigen(&avg);
    let threshold = gamma / l as f64;
    let keep: Vec<usize> = (0..d)
        .filter(|&i| vals[i] >= threshold * (1.0 - 1e-12))
        .collect();
    if keep.is_empty() {
        return Ok(empty(Vec::new()));
    }
    let mut basis = CMatrix::zeros(d, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &vecs.column(i));
    }
    Ok(SpanProjector {
        kind: SpanKind::Robust { gamma, members: l },
        n,
        rank: keep.len(),
        basis,
        provenance: keep.iter().map(|&i| format!("{:.6e}", vals[i])).collect(),
    })
}
