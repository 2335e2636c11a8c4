use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMatrix, C64};

/// Eigenvalues (descending) with orthonormal eigenvector columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

/// Eigenvalues closer than this are treated as one degenerate cluster
/// when a canonical basis is requested.
pub const DEGENERACY_TOL: f64 = 1e-9;

impl SpectralDecomposition {
    pub fn of_matrix(m: &CMatrix) -> Self {
        let (eigenvalues, eigenvectors) = linalg::hermitian_eigen(m);
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    /// Like [`of_matrix`](Self::of_matrix), with every degenerate eigenspace
    /// given its canonical basis so the result does not depend on the
    /// eigensolver's choice inside the eigenspace.
    pub fn canonical(m: &CMatrix) -> Self {
        let mut s = Self::of_matrix(m);
        let d = s.eigenvalues.len();
        let mut start = 0;
        while start < d {
            let mut end = start + 1;
            while end < d && (s.eigenvalues[start] - s.eigenvalues[end]).abs() <= DEGENERACY_TOL {
                end += 1;
            }
            if end - start > 1 {
                let block = s.eigenvectors.columns(start, end - start).clone_owned();
                let basis = linalg::canonical_basis(&block);
                if basis.ncols() == end - start {
                    for j in 0..basis.ncols() {
                        s.eigenvectors.set_column(start + j, &basis.column(j));
                    }
                }
            }
            start = end;
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Number of eigenvalues above `cutoff`.
    pub fn rank(&self, cutoff: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > cutoff).count()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= C64::from(l);
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Projector onto the span of the selected eigenvector columns.
    pub fn projector(&self, select: impl Fn(usize, f64) -> bool) -> CMatrix {
        let d = self.eigenvectors.nrows();
        let mut p = CMatrix::zeros(d, d);
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            if select(j, l) {
                let v = self.eigenvectors.column(j);
                p += v * v.adjoint();
            }
        }
        p
    }

    /// Largest off-diagonal modulus of the eigenvector Gram matrix.
    pub fn orthogonality_residual(&self) -> f64 {
        let g = self.eigenvectors.adjoint() * &self.eigenvectors;
        linalg::max_abs(&(g - linalg::identity(self.dim())))
    }
}
