use serde::{Deserialize, Serialize};

use super::distance::trace_distance;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{DensityOperator, SpectralDecomposition, RANK_CUTOFF};

/// Projective two-outcome measurement with its recorded advantage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherProjector {
    pub projector: CMatrix,
    pub advantage: f64,
}

impl DistinguisherProjector {
    /// `Tr(Πρ)`, the probability of the first outcome.
    pub fn accept_probability(&self, rho: &CMatrix) -> f64 {
        (&self.projector * rho).trace().re
    }
}

/// Optimal measurement: projector onto the non-negative eigenspace of
/// `ρ0 − ρ1`, with advantage `Tr(Πρ0) − Tr(Πρ1)`.
pub fn helstrom(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<DistinguisherProjector> {
    if rho0.layout() != rho1.layout() {
        return Err(Error::Layout("helstrom on different layouts".into()));
    }
    Ok(helstrom_matrices(rho0.matrix(), rho1.matrix()))
}

pub fn helstrom_matrices(rho0: &CMatrix, rho1: &CMatrix) -> DistinguisherProjector {
    let spec = SpectralDecomposition::of_matrix(&(rho0 - rho1));
    let projector = spec.projector(|_, l| l >= -1e-14);
    let advantage = (&projector * rho0).trace().re - (&projector * rho1).trace().re;
    DistinguisherProjector {
        projector,
        advantage,
    }
}

/// `|Tr Πρ0 − Tr Πρ1|`.
pub fn advantage(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    projector: &CMatrix,
) -> Result<f64> {
    if rho0.layout() != rho1.layout() {
        return Err(Error::Layout("advantage on different layouts".into()));
    }
    if projector.nrows() != rho0.dim() {
        return Err(Error::Dimension {
            expected: rho0.dim(),
            found: projector.nrows(),
        });
    }
    Ok(((projector * rho0.matrix()).trace().re - (projector * rho1.matrix()).trace().re).abs())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum OrthogonalityWitness {
    Witness {
        projector: DistinguisherProjector,
        residual_rho: f64,
        residual_sigma: f64,
    },
    Refusal {
        residual_rho: f64,
        residual_sigma: f64,
    },
}

/// Helstrom projector `Π` accepted as a witness when both `Tr((I−Π)ρ)` and
/// `Tr(Πσ)` are within `budget`.
pub fn almost_orthogonal_witness(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    budget: f64,
) -> Result<OrthogonalityWitness> {
    if !(budget > 0.0 && budget < 1.0) {
        return Err(Error::OutOfRange(format!("budget {budget} outside (0,1)")));
    }
    let p = helstrom(rho, sigma)?;
    let residual_rho = (rho.trace() - p.accept_probability(rho.matrix())).max(0.0);
    let residual_sigma = p.accept_probability(sigma.matrix()).max(0.0);
    Ok(if residual_rho <= budget && residual_sigma <= budget {
        OrthogonalityWitness::Witness {
            projector: p,
            residual_rho,
            residual_sigma,
        }
    } else {
        OrthogonalityWitness::Refusal {
            residual_rho,
            residual_sigma,
        }
    })
}

/// A divergence that may be infinite when supports are incompatible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Divergence {
    Finite {
        bits: f64,
    },
    /// `ρ` has weight `leakage` outside the support of `σ`.
    Infinite {
        leakage: f64,
    },
}

impl Divergence {
    pub fn value(&self) -> f64 {
        match self {
            Divergence::Finite { bits } => *bits,
            Divergence::Infinite { .. } => f64::INFINITY,
        }
    }
}

/// `D_∞(ρ‖σ) = log₂ λ_max(σ^{-1/2} ρ σ^{-1/2})` on the support of `σ`.
pub fn relative_min_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Divergence> {
    if rho.layout() != sigma.layout() {
        return Err(Error::Layout(
            "relative entropy on different layouts".into(),
        ));
    }
    Ok(relative_min_entropy_matrices(rho.matrix(), sigma.matrix()))
}

pub fn relative_min_entropy_matrices(rho: &CMatrix, sigma: &CMatrix) -> Divergence {
    let spec = SpectralDecomposition::of_matrix(sigma);
    let outside = spec.projector(|_, l| l <= RANK_CUTOFF);
    let leakage = linalg::trace_norm_hermitian(&(&outside * rho * &outside));
    if leakage > RANK_CUTOFF {
        return Divergence::Infinite { leakage };
    }
    let d = sigma.nrows();
    let mut inv_sqrt = CMatrix::zeros(d, d);
    for (j, &l) in spec.eigenvalues.iter().enumerate() {
        if l > RANK_CUTOFF {
            let v = spec.eigenvectors.column(j);
            inv_sqrt += (v * v.adjoint()).scale(1.0 / l.sqrt());
        }
    }
    let x = &inv_sqrt * rho * &inv_sqrt;
    Divergence::Finite {
        bits: linalg::lambda_max(&x).log2(),
    }
}

/// Entropy defect of the equal mixture of two nearly orthogonal states:
/// returns `(S((ρ+σ)/2) − (S(ρ)+S(σ))/2 − 1, δ)` with `δ = 1 − D(ρ,σ)`.
pub fn orthogonal_mixture_defect(
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<(f64, f64)> {
    use super::entropy::von_neumann;
    let mix = DensityOperator::mixture(&[(0.5, rho), (0.5, sigma)])?;
    let defect = von_neumann(&mix) - 0.5 * (von_neumann(rho) + von_neumann(sigma)) - 1.0;
    Ok((defect, 1.0 - trace_distance(rho, sigma)?))
}
