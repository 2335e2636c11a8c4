use serde::{Deserialize, Serialize};

use super::layout::RegisterLayout;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, ONE, ZERO};

pub const UNITARY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryOperator {
    layout: RegisterLayout,
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(layout: RegisterLayout, matrix: CMatrix) -> Result<Self> {
        let d = layout.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension {
                expected: d,
                found: matrix.nrows(),
            });
        }
        let res = linalg::max_abs(&(matrix.adjoint() * &matrix - linalg::identity(d)));
        if res > UNITARY_TOL {
            return Err(Error::InvalidState(format!("unitarity residual {res:e}")));
        }
        Ok(Self { layout, matrix })
    }

    /// Unitary on a fresh single register named `U`.
    pub fn on_qubits(qubits: usize, matrix: CMatrix) -> Result<Self> {
        Self::new(RegisterLayout::single("U", qubits)?, matrix)
    }

    pub fn identity(layout: RegisterLayout) -> Self {
        let d = layout.dim();
        Self {
            layout,
            matrix: linalg::identity(d),
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    pub fn dagger(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, after: &UnitaryOperator) -> Result<Self> {
        if after.matrix.nrows() != self.matrix.nrows() {
            return Err(Error::Dimension {
                expected: self.matrix.nrows(),
                found: after.matrix.nrows(),
            });
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &after.matrix * &self.matrix,
        })
    }

    pub fn tensor(&self, other: &UnitaryOperator) -> Result<Self> {
        Ok(Self {
            layout: self.layout.concat(&other.layout)?,
            matrix: linalg::kron(&self.matrix, &other.matrix),
        })
    }
}

/// Single- and two-qubit gate matrices.
pub mod gates {
    use super::*;

    pub fn h() -> CMatrix {
        let s = 1.0 / 2f64.sqrt();
        CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
    }

    pub fn s() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, linalg::I])
    }

    pub fn t() -> CMatrix {
        let w = std::f64::consts::FRAC_PI_4;
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(w.cos(), w.sin())])
    }

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, -linalg::I, linalg::I, ZERO])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// Control is the first (most significant) qubit.
    pub fn cnot() -> CMatrix {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = ONE;
        m[(1, 1)] = ONE;
        m[(2, 3)] = ONE;
        m[(3, 2)] = ONE;
        m
    }

    /// Swap of two `d`-dimensional systems.
    pub fn swap(d: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                m[(j * d + i, i * d + j)] = ONE;
            }
        }
        m
    }

    /// Rotation `exp(-iθY/2)`.
    pub fn ry(theta: f64) -> CMatrix {
        let (s, co) = (theta / 2.0).sin_cos();
        CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
    }
}
