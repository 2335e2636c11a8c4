//! Non-uniform pseudo-mixed state: extract from m copies of the low-entropy
//! side of an entropic pair.

use serde::{Deserialize, Serialize};

use super::efi::EntropicEfi;
use super::generator::{GenOp, GeneratorSpec};
use crate::clifford::{enumerate_dense, sample_dense, SamplingMode};
use crate::error::{Error, Result};
use crate::extractor::{self, apply_extractor_leading, decoupling_report};
use crate::linalg::{self, CVector, C64};
use crate::metrics::{self, entropy::von_neumann_of};
use crate::qstate::{max_qubits, purify, DensityOperator, RegisterLayout};

/// How the advice integer enters the run.
pub const ADVICE_SEMANTICS: &str = "k = a - m*gap/2 with a an upper estimate of m*S(sigma1)";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmsParams {
    pub m: usize,
    pub eps: f64,
    pub advice: i64,
    pub mode: SamplingMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmsReport {
    pub m: usize,
    pub n_in: usize,
    pub n_total: usize,
    pub eps: f64,
    pub advice: i64,
    pub advice_semantics: String,
    pub gap: f64,
    pub k: f64,
    /// Real-valued `(n·m + k)/2 − log₂(1/ε)`.
    pub ell_bound: f64,
    pub ell: usize,
    pub clamped: bool,
    pub extractor_feasible: bool,
    /// Certified lower bound on the smoothed min-entropy of σ1^⊗m.
    pub k_certified: f64,
    pub advice_consistent: bool,
    pub samples: usize,
    pub log_l: f64,
    pub branch_entropy_mean: f64,
    pub s_tau0: f64,
    pub output_qubits: f64,
    /// `ℓ − mean S(A1)`, equal to `output_qubits − S(τ0)`.
    pub margin: f64,
    pub tau1_distance: f64,
    pub tau1_standard_error: Option<f64>,
    pub tau1_within_eps: bool,
}

/// `⌈m·S(σ1)⌉`, the advice that brackets the high entropy to within one bit.
pub fn exact_advice(eefi: &EntropicEfi, m: usize) -> i64 {
    (m as f64 * eefi.s_sigma1() - 1e-9).ceil() as i64
}

fn copies(rho: &DensityOperator, m: usize) -> Result<DensityOperator> {
    let p = rho.tensor_power(m)?;
    p.relabel(RegisterLayout::single("A", p.n_qubits())?)
}

fn clifford_list(n: usize, mode: SamplingMode) -> Result<Vec<(u128, linalg::CMatrix)>> {
    match mode {
        SamplingMode::Full => Ok(enumerate_dense(n)?
            .iter()
            .enumerate()
            .map(|(j, u)| (j as u128, u.clone()))
            .collect()),
        SamplingMode::MonteCarlo { samples, seed } => sample_dense(n, samples, seed),
    }
}

/// Builds `τ0 = Ext_ℓ(σ0^⊗m)` and measures the entropy margin and the
/// decoupling of `τ1 = Ext_ℓ(σ1^⊗m)`. The Clifford family is the one
/// selected by `mode`; its members are indexed by position, so `log|L|`
/// is the logarithm of the number of branches.
pub fn pms_from_entropic(
    eefi: &EntropicEfi,
    params: PmsParams,
) -> Result<(GeneratorSpec, PmsReport)> {
    if eefi.degenerate {
        return Err(Error::Infeasible(format!(
            "entropic pair is degenerate (gap {:e})",
            eefi.gap
        )));
    }
    if !(params.eps > 0.0 && params.eps < 1.0) || params.m == 0 {
        return Err(Error::OutOfRange(format!(
            "m = {}, eps = {}",
            params.m, params.eps
        )));
    }
    let n_in = eefi.n_qubits();
    let n_total = n_in * params.m;
    if n_total > max_qubits() {
        return Err(Error::OutOfRange(format!(
            "{n_total} qubits for {} copies exceed the cap",
            params.m
        )));
    }
    let k = params.advice as f64 - params.m as f64 * eefi.gap / 2.0;
    let ell_bound = (n_total as f64 + k) / 2.0 - (1.0 / params.eps).log2();
    let ell_floor = (ell_bound + 1e-12).floor();
    if ell_floor < 1.0 {
        return Err(Error::Infeasible(format!(
            "output length bound {ell_bound:.4} below one qubit"
        )));
    }
    let ell = (ell_floor as usize).min(n_total);
    let clamped = (ell as f64) < ell_floor;
    let ext = extractor::params_with_ell(
        n_total,
        ell,
        k.clamp(-(n_total as f64), n_total as f64),
        params.eps,
    )?;

    let (s0, s1) = eefi.pair.states()?;
    let rho0 = copies(&s0, params.m)?;
    let rho1 = copies(&s1, params.m)?;
    let k_certified =
        metrics::smooth_entropy_bound(metrics::SmoothBound::MinLb, &rho1, ext.delta_smooth)?.value;

    let out0 = apply_extractor_leading(&rho0, &["A"], ell, params.mode)?;
    let samples = out0.branches.len();
    let entropies: Vec<f64> = out0
        .branches
        .iter()
        .map(|b| von_neumann_of(&linalg::hermitian_eigenvalues(&b.operator)))
        .collect();
    let branch_entropy_mean = entropies.iter().sum::<f64>() / samples as f64;
    let log_l = (samples as f64).log2();
    let out1 = decoupling_report(&apply_extractor_leading(&rho1, &["A"], ell, params.mode)?);

    let generator = tau0_generator(&rho0, ell, &clifford_list(n_total, params.mode)?)?;
    let report = PmsReport {
        m: params.m,
        n_in,
        n_total,
        eps: params.eps,
        advice: params.advice,
        advice_semantics: ADVICE_SEMANTICS.into(),
        gap: eefi.gap,
        k,
        ell_bound,
        ell,
        clamped,
        extractor_feasible: ext.feasible,
        k_certified,
        advice_consistent: k_certified >= k - 1e-9,
        samples,
        log_l,
        branch_entropy_mean,
        s_tau0: log_l + branch_entropy_mean,
        output_qubits: log_l + ell as f64,
        margin: ell as f64 - branch_entropy_mean,
        tau1_distance: out1.error,
        tau1_standard_error: out1.standard_error,
        tau1_within_eps: out1.error <= params.eps + 1e-9,
    };
    Ok((generator, report))
}

/// Circuit for `τ0`: a uniform index over the `K` family members on `L`,
/// copied into `M` so that it stays classical, the purification of `ρ0'` on
/// `A ⊗ P`, then the index-controlled Clifford on `A`. Output `L, A1`;
/// `M`, `A2` and `P` are traced. Needs `2⌈log₂K⌉ + n·m + |P|` qubits.
fn tau0_generator(
    rho0: &DensityOperator,
    ell: usize,
    cliffords: &[(u128, linalg::CMatrix)],
) -> Result<GeneratorSpec> {
    let n_a = rho0.n_qubits();
    let k = cliffords.len();
    let b = (usize::BITS - (k.max(2) - 1).leading_zeros()) as usize;
    let psi = purify(rho0)?;
    let n_p = psi.n_qubits() - n_a;
    let mut regs: Vec<(&str, usize)> = vec![("L", b), ("M", b), ("A1", ell)];
    if n_a > ell {
        regs.push(("A2", n_a - ell));
    }
    regs.push(("P", n_p));
    let layout = RegisterLayout::new(regs)?;
    let mut uniform = CVector::from_element(1 << b, C64::from(0.0));
    for j in 0..k {
        uniform[j] = C64::from(1.0 / (k as f64).sqrt());
    }
    let a0 = 2 * b;
    let mut ops = vec![GenOp::Unitary {
        qubits: (0..b).collect(),
        matrix: linalg::unitary_with_first_column(&uniform),
    }];
    ops.extend((0..b).map(|q| GenOp::Cnot {
        control: q,
        target: b + q,
    }));
    ops.push(GenOp::Unitary {
        qubits: (a0..a0 + n_a + n_p).collect(),
        matrix: linalg::unitary_with_first_column(psi.amplitudes()),
    });
    ops.push(GenOp::Multiplexed {
        controls: (0..b).collect(),
        qubits: (a0..a0 + n_a).collect(),
        unitaries: cliffords.iter().map(|(_, u)| u.clone()).collect(),
    });
    let mut traced = vec!["M".to_string()];
    if n_a > ell {
        traced.push("A2".to_string());
    }
    traced.push("P".to_string());
    GeneratorSpec::new("tau0", layout, ops, vec!["L".into(), "A1".into()], traced)
}
