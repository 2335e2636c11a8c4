use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{DensityOperator, RANK_CUTOFF};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyKind {
    VonNeumann,
    Min,
    Max,
    SmoothMinLb,
    SmoothMaxUb,
    ConditionalMin,
    RelativeMin,
}

/// Spectral data of a smoothing witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingCertificate {
    /// Eigenvalues of the witness state, descending.
    pub witness_spectrum: Vec<f64>,
    /// Probability mass removed from the input spectrum.
    pub removed_mass: f64,
    /// Number of eigenvalues removed.
    pub removed_count: usize,
    pub trace_distance: f64,
    pub purified_distance: f64,
}

/// Optimizer output of the conditional min-entropy solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalCertificate {
    /// Marginal `σ_B` attaining the reported value.
    pub sigma_b: CMatrix,
    /// `λ_max((I⊗σ_B)^{-1/2} ρ (I⊗σ_B)^{-1/2})`.
    pub objective: f64,
    /// Dual lower bound on the optimal objective.
    pub dual_bound: f64,
    pub iterations: usize,
    /// Best objective found by the Bloch-ball grid when B is one qubit.
    pub grid_objective: Option<f64>,
    /// Smoothing applied before optimizing, if any.
    pub smoothing: Option<SmoothingCertificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    Smoothing(SmoothingCertificate),
    Conditional(ConditionalCertificate),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub kind: EntropyKind,
    pub value: f64,
    pub epsilon: Option<f64>,
    pub certificate: Option<Certificate>,
}

impl EntropyReport {
    fn plain(kind: EntropyKind, value: f64) -> Self {
        Self {
            kind,
            value,
            epsilon: None,
            certificate: None,
        }
    }

    /// CSV row: kind, value, epsilon, certificate spectrum (`;`-separated).
    pub fn csv_row(&self) -> Vec<String> {
        let spectrum = match &self.certificate {
            Some(Certificate::Smoothing(c)) => c
                .witness_spectrum
                .iter()
                .map(|x| format!("{x:e}"))
                .collect::<Vec<_>>()
                .join(";"),
            Some(Certificate::Conditional(c)) => format!("objective={:e}", c.objective),
            None => String::new(),
        };
        vec![
            serde_json::to_value(self.kind)
                .map(|v| v.as_str().unwrap_or("").to_string())
                .unwrap_or_default(),
            format!("{:e}", self.value),
            self.epsilon.map(|e| format!("{e:e}")).unwrap_or_default(),
            spectrum,
        ]
    }
}

/// Von Neumann entropy of a spectrum, base 2.
pub fn von_neumann_of(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|&x| linalg::xlogx_neg(x)).sum()
}

pub fn von_neumann(rho: &DensityOperator) -> f64 {
    von_neumann_of(&rho.eigenvalues())
}

pub fn min_entropy_of(spectrum: &[f64]) -> f64 {
    let top = spectrum.iter().cloned().fold(0.0f64, f64::max);
    -top.log2()
}

pub fn max_entropy_of(spectrum: &[f64]) -> f64 {
    let rank = spectrum.iter().filter(|&&x| x > RANK_CUTOFF).count();
    (rank as f64).log2()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlainEntropy {
    VonNeumann,
    Min,
    Max,
}

pub fn entropy(kind: PlainEntropy, rho: &DensityOperator) -> EntropyReport {
    let spec = rho.eigenvalues();
    match kind {
        PlainEntropy::VonNeumann => {
            EntropyReport::plain(EntropyKind::VonNeumann, von_neumann_of(&spec))
        }
        PlainEntropy::Min => EntropyReport::plain(EntropyKind::Min, min_entropy_of(&spec)),
        PlainEntropy::Max => EntropyReport::plain(EntropyKind::Max, max_entropy_of(&spec)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothBound {
    MinLb,
    MaxUb,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::OutOfRange(format!(
            "smoothing parameter {eps} outside [0, 1/2]"
        )));
    }
    Ok(())
}

/// Certified one-sided bound on a smoothed entropy.
///
/// `min_lb` removes the largest eigenvalues with total mass at most `ε/2`
/// and reports the min-entropy of the renormalized remainder, which is
/// `s + log₂(1−p)` for threshold `2^{-s}` and removed mass `p`.
/// `max_ub` removes the smallest eigenvalues with total mass `m` satisfying
/// `√(2m) ≤ ε` and reports `log₂` of the remaining rank.
pub fn smooth_entropy_bound(
    kind: SmoothBound,
    rho: &DensityOperator,
    eps: f64,
) -> Result<EntropyReport> {
    check_eps(eps)?;
    let spec = rho.eigenvalues();
    Ok(match kind {
        SmoothBound::MinLb => smooth_min_lb_with_budget(&spec, eps / 2.0, Some(eps)),
        SmoothBound::MaxUb => smooth_max_ub_of(&spec, eps)?,
    })
}

/// `min_lb` on a bare spectrum.
pub fn smooth_min_lb_of(spectrum: &[f64], eps: f64) -> Result<EntropyReport> {
    check_eps(eps)?;
    Ok(smooth_min_lb_with_budget(spectrum, eps / 2.0, Some(eps)))
}

/// `min_lb` with an explicit removable mass. The best cut is always a set
/// of top eigenvalues; every feasible prefix is tried.
pub fn smooth_min_lb_with_budget(
    spectrum: &[f64],
    mass_budget: f64,
    eps: Option<f64>,
) -> EntropyReport {
    let mut sorted: Vec<f64> = spectrum.iter().map(|&x| x.max(0.0)).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let total: f64 = sorted.iter().sum();
    let mut best_k = 0usize;
    let mut best = f64::NEG_INFINITY;
    let mut removed = 0.0;
    for (k, &top) in sorted.iter().enumerate() {
        if removed > mass_budget + 1e-15 {
            break;
        }
        let rest = total - removed;
        if top <= 0.0 || rest <= 0.0 {
            break;
        }
        let value = -(top / rest).log2();
        if value > best {
            best = value;
            best_k = k;
        }
        removed += top;
    }
    let p: f64 = sorted[..best_k].iter().sum();
    let rest = total - p;
    let witness: Vec<f64> = sorted[best_k..].iter().map(|x| x / rest).collect();
    let fid: f64 = sorted[best_k..]
        .iter()
        .map(|&x| (x * x / rest).sqrt())
        .sum();
    let cert = SmoothingCertificate {
        trace_distance: 0.5 * (p + sorted[best_k..].iter().map(|&x| x / rest - x).sum::<f64>()),
        purified_distance: (1.0 - fid.min(1.0).powi(2)).max(0.0).sqrt(),
        witness_spectrum: witness,
        removed_mass: p,
        removed_count: best_k,
    };
    EntropyReport {
        kind: EntropyKind::SmoothMinLb,
        value: best,
        epsilon: eps,
        certificate: Some(Certificate::Smoothing(cert)),
    }
}

/// `max_ub` on a bare spectrum.
pub fn smooth_max_ub_of(spectrum: &[f64], eps: f64) -> Result<EntropyReport> {
    check_eps(eps)?;
    let mut sorted: Vec<f64> = spectrum.iter().map(|&x| x.max(0.0)).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let budget = eps * eps / 2.0;
    let mut kept = sorted.len();
    let mut removed = 0.0;
    while kept > 1 && removed + sorted[kept - 1] <= budget + 1e-15 {
        removed += sorted[kept - 1];
        kept -= 1;
    }
    let witness: Vec<f64> = sorted[..kept].to_vec();
    let total: f64 = sorted.iter().sum();
    let kept_mass: f64 = witness.iter().sum();
    let fid = kept_mass + ((1.0 - total).max(0.0) * (1.0 - kept_mass).max(0.0)).sqrt();
    let cert = SmoothingCertificate {
        trace_distance: 0.5 * removed + 0.5 * removed,
        purified_distance: (1.0 - fid.min(1.0).powi(2)).max(0.0).sqrt(),
        witness_spectrum: witness.clone(),
        removed_mass: removed,
        removed_count: sorted.len() - kept,
    };
    Ok(EntropyReport {
        kind: EntropyKind::SmoothMaxUb,
        value: max_entropy_of(&witness),
        epsilon: Some(eps),
        certificate: Some(Certificate::Smoothing(cert)),
    })
}

/// Spectrum of the `m`-fold tensor power of an operator with `spectrum`.
pub fn tensor_power_spectrum(spectrum: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..m {
        out = out
            .iter()
            .flat_map(|a| spectrum.iter().map(move |b| a * b))
            .collect();
    }
    out
}

/// Sharp continuity bound `T log₂(d−1) + h(T)` for `T ≤ 1 − 1/d`.
pub fn audenaert_bound(t: f64, d: usize) -> f64 {
    let t = t.clamp(0.0, 1.0);
    let lead = if d > 1 {
        t * ((d - 1) as f64).log2()
    } else {
        0.0
    };
    lead + linalg::binary_entropy(t)
}
