use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::qstate::{DensityOperator, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    Trace,
    Fidelity,
    Purified,
}

fn check_same(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.layout() != sigma.layout() {
        return Err(Error::Layout(format!(
            "distance between different layouts {} and {}",
            rho.layout(),
            sigma.layout()
        )));
    }
    Ok(())
}

pub fn state_distance(
    kind: DistanceKind,
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<f64> {
    match kind {
        DistanceKind::Trace => trace_distance(rho, sigma),
        DistanceKind::Fidelity => fidelity(rho, sigma),
        DistanceKind::Purified => purified_distance(rho, sigma),
    }
}

/// Generalized trace distance `½‖ρ−σ‖₁ + ½|Tr ρ − Tr σ|`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_same(rho, sigma)?;
    Ok(trace_distance_matrices(rho.matrix(), sigma.matrix()))
}

/// Same formula on raw Hermitian matrices.
pub fn trace_distance_matrices(a: &linalg::CMatrix, b: &linalg::CMatrix) -> f64 {
    let diff = a - b;
    let norm = linalg::trace_norm_hermitian(&diff);
    let dtr = (a.trace().re - b.trace().re).abs();
    (0.5 * norm + 0.5 * dtr).clamp(0.0, 1.0)
}

/// Generalized fidelity `‖√ρ√σ‖₁ + √((1−Tr ρ)(1−Tr σ))`.
///
/// The overlap is the sum of singular values of `X_ρ† X_σ` with
/// `X X† = ρ` restricted to the support. Square roots of eigenvalues that
/// are zero up to rounding would otherwise cost about `1e-8` of accuracy.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_same(rho, sigma)?;
    let xr = linalg::psd_factor(rho.matrix(), FIDELITY_CUTOFF);
    let xs = linalg::psd_factor(sigma.matrix(), FIDELITY_CUTOFF);
    let overlap: f64 = linalg::singular_values(&(xr.adjoint() * xs)).iter().sum();
    let tail = ((1.0 - rho.trace()).max(0.0) * (1.0 - sigma.trace()).max(0.0)).sqrt();
    Ok((overlap + tail).clamp(0.0, 1.0))
}

/// Eigenvalues at or below this count as zero in [`fidelity`].
pub const FIDELITY_CUTOFF: f64 = 1e-13;

/// `√(1 − F²)`.
pub fn purified_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// Trace distance of two pure states, `√(1 − |⟨ψ|φ⟩|²)`.
pub fn pure_trace_distance(psi: &PureState, phi: &PureState) -> Result<f64> {
    Ok((1.0 - psi.fidelity(phi)?).max(0.0).sqrt())
}
