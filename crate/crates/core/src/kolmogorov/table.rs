//! Per-state complexity table.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measures::{hbar, hbar_smooth, knet, umin, umin_smooth};
use super::mixture::UniversalMixture;
use super::span::{robust_span_projector, span_projector};
use crate::error::Result;
use crate::family::FamilySpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub state_id: String,
    /// Empty when above the enumeration cap.
    pub knet: Option<usize>,
    pub hbar: f64,
    pub hbar_eps: f64,
    pub umin: f64,
    pub umin_eps: f64,
    pub span_overlap_r: f64,
    pub robust_overlap_r_gamma: f64,
}

/// One row per family member; `eps` is both the `Knet` fidelity slack and
/// the smoothing radius, `r` the plain span cap and `gamma` the robustness
/// of the family's own robust span.
pub fn complexity_rows(
    mu: &UniversalMixture,
    family: &FamilySpec,
    eps: f64,
    r: usize,
    gamma: f64,
) -> Result<Vec<ComplexityRow>> {
    let plain = span_projector(mu, r.min(mu.l_max))?;
    let robust = robust_span_projector(family.n, &family.states(), gamma)?;
    family
        .members
        .par_iter()
        .map(|m| {
            let psi = &m.state;
            Ok(ComplexityRow {
                state_id: m.key.clone(),
                knet: knet(mu, psi, eps)?.bits(),
                hbar: hbar(mu, psi)?,
                hbar_eps: hbar_smooth(mu, psi, eps)?.bits,
                umin: umin(mu, psi)?.value(),
                umin_eps: umin_smooth(mu, psi, eps)?.bits,
                span_overlap_r: plain.weight(psi)?,
                robust_overlap_r_gamma: robust.weight(psi)?,
            })
        })
        .collect()
}

pub fn write_complexity_csv<W: Write>(rows: &[ComplexityRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
