//! Single-copy GapH decision procedure: extract from the family average and
//! test each extracted branch against the maximally mixed state.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{enumerate_dense, sample_dense, SamplingMode};
use crate::error::{Error, Result};
use crate::family::{FamilySpec, Side};
use crate::linalg::{self, CMatrix};
use crate::metrics::{distance::trace_distance_matrices, distinguish::helstrom_matrices};
use crate::qstate::PureState;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapHParams {
    pub r: usize,
    pub delta: f64,
    pub eps: f64,
    pub mode: SamplingMode,
}

/// Per-branch Cliffords and Helstrom projectors `Π_j` on the first `ℓ` qubits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapHDecider {
    pub n: usize,
    pub ell: usize,
    pub cliffords: Vec<u128>,
    #[serde(skip)]
    unitaries: Vec<CMatrix>,
    #[serde(skip)]
    projectors: Vec<CMatrix>,
}

impl GapHDecider {
    fn branch(&self, j: usize, psi: &PureState) -> CMatrix {
        let mut v = psi.amplitudes().clone();
        let all: Vec<usize> = (0..self.n).collect();
        linalg::apply_to_slice(v.as_mut_slice(), self.n, &all, &self.unitaries[j]);
        let keep: Vec<usize> = (0..self.ell).collect();
        linalg::reduced_from_vector(v.as_slice(), self.n, &keep)
    }

    fn check(&self, psi: &PureState) -> Result<()> {
        if psi.n_qubits() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: psi.n_qubits(),
            });
        }
        Ok(())
    }

    /// Probability of answering "low": the branch-averaged `Tr(Π_j ρ_j(ψ))`.
    pub fn pr_low(&self, psi: &PureState) -> Result<f64> {
        self.check(psi)?;
        let s: f64 = (0..self.unitaries.len())
            .map(|j| (&self.projectors[j] * self.branch(j, psi)).trace().re)
            .sum();
        Ok(s / self.unitaries.len() as f64)
    }

    /// One run of the procedure: a uniform branch, then the two-outcome test.
    pub fn decide(&self, psi: &PureState, rng: &mut Rng) -> Result<Side> {
        self.check(psi)?;
        let j = rng.gen_range(0..self.unitaries.len());
        let p = (&self.projectors[j] * self.branch(j, psi)).trace().re;
        Ok(if rng.gen::<f64>() < p {
            Side::Low
        } else {
            Side::High
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberDecision {
    pub key: String,
    pub planted: Option<Side>,
    pub pr_low: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapHReport {
    pub n: usize,
    pub r: usize,
    pub delta: f64,
    pub eps: f64,
    /// `⌊(n + r + Δ/2)/2⌋` before clamping to `n`.
    pub ell_raw: usize,
    pub ell: usize,
    pub clamped: bool,
    pub samples: usize,
    /// `D(Ext_ℓ(ρ), I_L/|L| ⊗ I/2^ℓ)`.
    pub distance_to_uniform: f64,
    /// `Tr(Π · I_L/|L| ⊗ I/2^ℓ)`.
    pub pr_low_uniform: f64,
    /// Family-weighted `Pr[low]`, equal to `pr_low_uniform + distance_to_uniform`.
    pub pr_low_average: f64,
    pub pr_low_given_low: Option<f64>,
    pub pr_low_given_high: Option<f64>,
    pub advantage: Option<f64>,
    /// Two-sample standard error of the advantage over the members.
    pub advantage_standard_error: Option<f64>,
    pub members: Vec<MemberDecision>,
}

/// `⌊(n + r + Δ/2)/2⌋`.
pub fn gaph_ell(n: usize, r: usize, delta: f64) -> usize {
    ((n as f64 + r as f64 + delta / 2.0) / 2.0 + 1e-12)
        .floor()
        .max(0.0) as usize
}

pub fn gaph_decider(family: &FamilySpec, params: GapHParams) -> Result<(GapHDecider, GapHReport)> {
    let n = family.n;
    let ell_raw = gaph_ell(n, params.r, params.delta);
    let ell = ell_raw.min(n);
    if ell == 0 {
        return Err(Error::Infeasible("output length 0".into()));
    }
    let rho = family
        .conditional_average(|_| true)
        .expect("nonempty family");
    let list: Vec<(u128, CMatrix)> = match params.mode {
        SamplingMode::Full => enumerate_dense(n)?
            .iter()
            .enumerate()
            .map(|(j, u)| (j as u128, u.clone()))
            .collect(),
        SamplingMode::MonteCarlo { samples, seed } => sample_dense(n, samples, seed)?,
    };
    let d1 = 1usize << ell;
    let uniform = linalg::identity(d1).scale(1.0 / d1 as f64);
    let all: Vec<usize> = (0..n).collect();
    let keep: Vec<usize> = (0..ell).collect();
    let per_branch: Vec<(CMatrix, f64, f64)> = list
        .par_iter()
        .map(|(_, u)| {
            let branch =
                linalg::partial_trace_qubits(&linalg::conjugate_on(&rho, n, &all, u), n, &keep);
            let pi = helstrom_matrices(&branch, &uniform).projector;
            let pu = pi.trace().re / d1 as f64;
            (pi, trace_distance_matrices(&branch, &uniform), pu)
        })
        .collect();
    let k = list.len() as f64;
    let distance_to_uniform = per_branch.iter().map(|b| b.1).sum::<f64>() / k;
    let pr_low_uniform = per_branch.iter().map(|b| b.2).sum::<f64>() / k;
    let decider = GapHDecider {
        n,
        ell,
        cliffords: list.iter().map(|(i, _)| *i).collect(),
        unitaries: list.into_iter().map(|(_, u)| u).collect(),
        projectors: per_branch.into_iter().map(|b| b.0).collect(),
    };

    let members: Vec<MemberDecision> = family
        .members
        .par_iter()
        .map(|m| {
            Ok(MemberDecision {
                key: m.key.clone(),
                planted: m.planted,
                pr_low: decider.pr_low(&m.state)?,
            })
        })
        .collect::<Result<_>>()?;
    let pr_low_average = family
        .members
        .iter()
        .zip(&members)
        .map(|(m, d)| m.weight * d.pr_low)
        .sum();
    let side = |s: Side| -> Option<(f64, f64, usize)> {
        let picked: Vec<(f64, f64)> = family
            .members
            .iter()
            .zip(&members)
            .filter(|(m, _)| m.planted == Some(s))
            .map(|(m, d)| (m.weight, d.pr_low))
            .collect();
        let w: f64 = picked.iter().map(|p| p.0).sum();
        if picked.is_empty() || w <= 0.0 {
            return None;
        }
        let mean = picked.iter().map(|p| p.0 * p.1).sum::<f64>() / w;
        let c = picked.len();
        let var = if c > 1 {
            picked.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>() / (c - 1) as f64
        } else {
            0.0
        };
        Some((mean, var, c))
    };
    let low = side(Side::Low);
    let high = side(Side::High);
    let (advantage, advantage_standard_error) = match (low, high) {
        (Some(l), Some(h)) => (
            Some((l.0 - h.0).abs()),
            Some((l.1 / l.2 as f64 + h.1 / h.2 as f64).sqrt()),
        ),
        _ => (None, None),
    };
    let report = GapHReport {
        n,
        r: params.r,
        delta: params.delta,
        eps: params.eps,
        ell_raw,
        ell,
        clamped: ell < ell_raw,
        samples: decider.unitaries.len(),
        distance_to_uniform,
        pr_low_uniform,
        pr_low_average,
        pr_low_given_low: low.map(|l| l.0),
        pr_low_given_high: high.map(|h| h.0),
        advantage,
        advantage_standard_error,
        members,
    };
    Ok((decider, report))
}
