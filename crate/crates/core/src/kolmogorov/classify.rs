//! Labels family members under the gap notions and scores a distinguisher.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measures::{hbar, hbar_smooth, umin, umin_smooth};
use super::mixture::UniversalMixture;
use super::span::span_projector;
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::linalg::CMatrix;
use crate::metrics::distinguish::helstrom_matrices;
use crate::qstate::PureState;

/// Slack on the promise: each side must carry at least `1/2 − PROMISE_SLACK`.
pub const PROMISE_SLACK: f64 = 0.01;
/// A state lies in a span if its weight there is at least `1 − ε − SPAN_TOL`.
pub const SPAN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    /// Low: `H̄^{1−ε} ≤ r`. High: `H̄ ≥ r + Δ`.
    GapH,
    /// Low: `U_min ≤ r`. High: `U_min^{1−ε} ≥ r + Δ`.
    GapU,
    /// Low: `H̄^{1−ε} ≤ r`. High: `H̄^ε ≥ r + Δ`.
    DGapH,
    /// Low: weight at least `1 − ε` in `Π_r`. High: weight at most `ε` in `Π_{r+Δ}`.
    Span,
}

impl std::str::FromStr for Notion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "gaph" => Ok(Notion::GapH),
            "gapu" => Ok(Notion::GapU),
            "dgaph" => Ok(Notion::DGapH),
            "span" => Ok(Notion::Span),
            _ => Err(Error::Config(format!("unknown gap notion `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Low,
    High,
    Neither,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MemberLabel {
    pub key: String,
    pub weight: f64,
    pub label: Label,
    /// Quantity compared against `r`.
    pub low_statistic: f64,
    /// Quantity compared against `r + Δ`.
    pub high_statistic: f64,
    /// Probability that the distinguisher answers "low".
    pub accept_low: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapInstanceReport {
    pub notion: Notion,
    pub r: f64,
    pub delta: f64,
    pub eps: f64,
    pub fraction_low: f64,
    pub fraction_high: f64,
    pub fraction_neither: f64,
    pub promise_holds: bool,
    pub distinguisher: String,
    /// `|Pr[low | high] − Pr[low | low]|`, if both classes are nonempty.
    pub advantage: Option<f64>,
    pub members: Vec<MemberLabel>,
}

fn label_member(
    mu: &UniversalMixture,
    psi: &PureState,
    notion: Notion,
    r: f64,
    delta: f64,
    eps: f64,
    spans: Option<&(super::span::SpanProjector, super::span::SpanProjector)>,
) -> Result<(Label, f64, f64)> {
    let far = 1.0 - eps;
    let (lo_stat, hi_stat, low, high) = match notion {
        Notion::GapH => {
            let a = hbar_smooth(mu, psi, far)?.bits;
            let b = hbar(mu, psi)?;
            (a, b, a <= r, b >= r + delta)
        }
        Notion::GapU => {
            let a = umin(mu, psi)?.value();
            let b = umin_smooth(mu, psi, far)?.bits;
            (a, b, a <= r, b >= r + delta)
        }
        Notion::DGapH => {
            let a = hbar_smooth(mu, psi, far)?.bits;
            let b = hbar_smooth(mu, psi, eps)?.bits;
            (a, b, a <= r, b >= r + delta)
        }
        Notion::Span => {
            let (pr, prd) = spans.expect("span projectors prepared");
            let a = pr.weight(psi)?;
            let b = prd.weight(psi)?;
            (a, b, a >= 1.0 - eps - SPAN_TOL, b <= eps + SPAN_TOL)
        }
    };
    let label = if low {
        Label::Low
    } else if high {
        Label::High
    } else {
        Label::Neither
    };
    Ok((label, lo_stat, hi_stat))
}

/// Labels every member and scores `distinguisher` (a projector whose
/// acceptance means "low"). Without one, the Helstrom projector between the
/// label-conditioned averages is used.
pub fn classify_instance(
    family: &FamilySpec,
    mu: &UniversalMixture,
    notion: Notion,
    r: f64,
    delta: f64,
    eps: f64,
    distinguisher: Option<(&str, &CMatrix)>,
) -> Result<GapInstanceReport> {
    if family.n != mu.n {
        return Err(Error::Dimension {
            expected: mu.n,
            found: family.n,
        });
    }
    if !(0.0 < eps && eps < 1.0 && delta > 0.0) {
        return Err(Error::OutOfRange(format!(
            "gap parameters ε={eps}, Δ={delta}"
        )));
    }
    let spans = if notion == Notion::Span {
        if r < 0.0 {
            return Err(Error::OutOfRange("span length must be nonnegative".into()));
        }
        let lo = r.floor() as usize;
        let hi = ((r + delta).floor() as usize).min(mu.l_max);
        Some((
            span_projector(mu, lo.min(mu.l_max))?,
            span_projector(mu, hi)?,
        ))
    } else {
        None
    };
    let labels: Vec<(Label, f64, f64)> = family
        .members
        .par_iter()
        .map(|m| label_member(mu, &m.state, notion, r, delta, eps, spans.as_ref()))
        .collect::<Result<_>>()?;
    let frac = |l: Label| -> f64 {
        family
            .members
            .iter()
            .zip(&labels)
            .filter(|(_, x)| x.0 == l)
            .map(|(m, _)| m.weight)
            .sum()
    };
    let (fl, fh, fnn) = (frac(Label::Low), frac(Label::High), frac(Label::Neither));
    let rho_low = family.conditional_average(|i| labels[i].0 == Label::Low);
    let rho_high = family.conditional_average(|i| labels[i].0 == Label::High);
    let (name, projector) = match distinguisher {
        Some((name, p)) => (name.to_string(), Some(p.clone())),
        None => match (&rho_low, &rho_high) {
            (Some(a), Some(b)) => (
                "helstrom".to_string(),
                Some(helstrom_matrices(a, b).projector),
            ),
            _ => ("none".to_string(), None),
        },
    };
    let accept = |psi: &PureState| -> f64 {
        projector
            .as_ref()
            .map(|p| {
                let v = psi.amplitudes();
                v.dotc(&(p * v)).re
            })
            .unwrap_or(0.0)
    };
    let members: Vec<MemberLabel> = family
        .members
        .iter()
        .zip(&labels)
        .map(|(m, &(label, a, b))| MemberLabel {
            key: m.key.clone(),
            weight: m.weight,
            label,
            low_statistic: a,
            high_statistic: b,
            accept_low: accept(&m.state),
        })
        .collect();
    let advantage = match (&projector, &rho_low, &rho_high) {
        (Some(p), Some(a), Some(b)) => {
            let ea = (p * a).trace();
            let eb = (p * b).trace();
            Some((eb - ea).norm())
        }
        _ => None,
    };
    Ok(GapInstanceReport {
        notion,
        r,
        delta,
        eps,
        fraction_low: fl,
        fraction_high: fh,
        fraction_neither: fnn,
        promise_holds: fl >= 0.5 - PROMISE_SLACK && fh >= 0.5 - PROMISE_SLACK,
        distinguisher: name,
        advantage,
        members,
    })
}
