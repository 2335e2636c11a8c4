use serde::{Deserialize, Serialize};

use super::layout::RegisterLayout;
use super::pure::PureState;
use super::spectral::SpectralDecomposition;
use super::unitary::UnitaryOperator;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

pub const HERMITIAN_TOL: f64 = 1e-9;
pub const NEGATIVE_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;

/// Density operator, or semi-density operator when `subnormalized` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityOperator {
    layout: RegisterLayout,
    matrix: CMatrix,
    subnormalized: bool,
}

impl DensityOperator {
    /// Validated construction of a normalized operator.
    pub fn new(layout: RegisterLayout, matrix: CMatrix) -> Result<Self> {
        Self::validated(layout, matrix, false)
    }

    /// Validated construction of an operator with trace at most 1.
    pub fn new_subnormalized(layout: RegisterLayout, matrix: CMatrix) -> Result<Self> {
        Self::validated(layout, matrix, true)
    }

    fn validated(layout: RegisterLayout, matrix: CMatrix, subnormalized: bool) -> Result<Self> {
        let d = layout.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension {
                expected: d,
                found: matrix.nrows(),
            });
        }
        let herm = linalg::hermiticity_residual(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "hermiticity residual {herm:e}"
            )));
        }
        let mut matrix = linalg::symmetrize(&matrix);
        let (vals, vecs) = linalg::hermitian_eigen(&matrix);
        let min = vals.last().copied().unwrap_or(0.0);
        if min < -NEGATIVE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        if min < 0.0 {
            let mut scaled = vecs.clone();
            for (j, &l) in vals.iter().enumerate() {
                let s = l.max(0.0);
                for i in 0..d {
                    scaled[(i, j)] *= s;
                }
            }
            matrix = scaled * vecs.adjoint();
        }
        let tr = matrix.trace().re;
        if subnormalized {
            if tr > 1.0 + TRACE_TOL {
                return Err(Error::InvalidState(format!("trace {tr} exceeds 1")));
            }
        } else if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        Ok(Self {
            layout,
            matrix,
            subnormalized,
        })
    }

    /// Construction without validation, for operators that are PSD by
    /// construction (conjugations, partial traces, mixtures).
    pub(crate) fn from_trusted(
        layout: RegisterLayout,
        matrix: CMatrix,
        subnormalized: bool,
    ) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.dim());
        Self {
            layout,
            matrix,
            subnormalized,
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            layout: psi.layout().clone(),
            matrix: linalg::outer(psi.amplitudes()),
            subnormalized: false,
        }
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let d = layout.dim();
        Self {
            layout,
            matrix: linalg::identity(d).scale(1.0 / d as f64),
            subnormalized: false,
        }
    }

    /// `|index⟩⟨index|`.
    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        Ok(Self::from_pure(&PureState::basis(layout, index)?))
    }

    /// Diagonal operator with the given (validated) entries.
    pub fn diagonal(layout: RegisterLayout, diag: &[f64]) -> Result<Self> {
        let d = layout.dim();
        if diag.len() != d {
            return Err(Error::Dimension {
                expected: d,
                found: diag.len(),
            });
        }
        let mut m = CMatrix::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::from(x);
        }
        let tr: f64 = diag.iter().sum();
        if (tr - 1.0).abs() <= TRACE_TOL {
            Self::new(layout, m)
        } else {
            Self::new_subnormalized(layout, m)
        }
    }

    /// Convex combination `Σ w_i ρ_i` over a shared layout.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?
            .1;
        let d = first.dim();
        let mut m = CMatrix::zeros(d, d);
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.layout != first.layout {
                return Err(Error::Layout("mixture components differ in layout".into()));
            }
            if *w < 0.0 {
                return Err(Error::OutOfRange("negative mixture weight".into()));
            }
            m += rho.matrix.scale(*w);
            total += w * rho.trace();
        }
        let sub = (total - 1.0).abs() > TRACE_TOL;
        if total > 1.0 + TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "mixture trace {total} exceeds 1"
            )));
        }
        Ok(Self {
            layout: first.layout.clone(),
            matrix: m,
            subnormalized: sub,
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Scaled copy; the result is flagged subnormalized.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&factor) {
            return Err(Error::OutOfRange(format!("scale factor {factor}")));
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: self.matrix.scale(factor),
            subnormalized: true,
        })
    }

    /// Renormalized copy (trace 1).
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 1e-300 {
            return Err(Error::InvalidState("zero operator".into()));
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: self.matrix.scale(1.0 / t),
            subnormalized: false,
        })
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self {
            layout,
            matrix: linalg::kron(&self.matrix, &other.matrix),
            subnormalized: self.subnormalized || other.subnormalized,
        })
    }

    /// `m`-fold tensor power with registers suffixed `_1 … _m`.
    pub fn tensor_power(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange("tensor power 0".into()));
        }
        let mut out: Option<DensityOperator> = None;
        for copy in 1..=m {
            let renamed = Self {
                layout: RegisterLayout::new(
                    self.layout
                        .registers()
                        .iter()
                        .map(|r| (format!("{}_{copy}", r.name), r.qubits)),
                )?,
                matrix: self.matrix.clone(),
                subnormalized: self.subnormalized,
            };
            out = Some(match out {
                None => renamed,
                Some(acc) => acc.tensor(&renamed)?,
            });
        }
        Ok(out.expect("m ≥ 1"))
    }

    /// Partial trace keeping the named registers (in layout order).
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let layout = self.layout.restrict(keep)?;
        let keep_names: Vec<&str> = layout.names();
        let qubits = self.layout.qubits_of(&keep_names)?;
        let matrix = linalg::partial_trace_qubits(&self.matrix, self.n_qubits(), &qubits);
        Ok(Self {
            layout,
            matrix,
            subnormalized: self.subnormalized,
        })
    }

    /// Partial trace over the named registers.
    pub fn trace_out<S: AsRef<str>>(&self, traced: &[S]) -> Result<Self> {
        for t in traced {
            if !self.layout.contains(t.as_ref()) {
                return Err(Error::UnknownRegister(t.as_ref().to_string()));
            }
        }
        let keep = self.layout.others(traced);
        self.partial_trace(&keep)
    }

    /// `U ρ U†` with `U` on the named registers.
    pub fn apply_unitary<S: AsRef<str>>(&self, u: &UnitaryOperator, targets: &[S]) -> Result<Self> {
        let qubits = self.layout.qubits_of(targets)?;
        self.apply_on_qubits(u.matrix(), &qubits)
    }

    /// Conjugation by a matrix acting on absolute qubit positions.
    pub fn apply_on_qubits(&self, u: &CMatrix, qubits: &[usize]) -> Result<Self> {
        if u.nrows() != 1usize << qubits.len() {
            return Err(Error::Dimension {
                expected: 1 << qubits.len(),
                found: u.nrows(),
            });
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: linalg::conjugate_on(&self.matrix, self.n_qubits(), qubits, u),
            subnormalized: self.subnormalized,
        })
    }

    /// Registers reordered; matrix permuted accordingly.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let layout = self.layout.reorder(order)?;
        let qubit_order = self.layout.qubits_of(order)?;
        Ok(Self {
            layout,
            matrix: linalg::permute_qubits(&self.matrix, self.n_qubits(), &qubit_order),
            subnormalized: self.subnormalized,
        })
    }

    /// Same matrix under a new layout of equal dimension.
    pub fn relabel(&self, layout: RegisterLayout) -> Result<Self> {
        if layout.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: layout.dim(),
            });
        }
        Ok(Self {
            layout,
            matrix: self.matrix.clone(),
            subnormalized: self.subnormalized,
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn spectral(&self) -> SpectralDecomposition {
        SpectralDecomposition::of_matrix(&self.matrix)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        let v = psi.amplitudes();
        Ok(v.dotc(&(&self.matrix * v)).re)
    }
}
