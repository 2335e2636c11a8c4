//! Finite weighted families of pure states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::qstate::{DensityOperator, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Every key enumerated with its probability.
    Keyed,
    /// A fixed sample of members drawn by a seeded sampler.
    Samplable,
}

/// Which half of a planted family a member was built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Low,
    High,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyMember {
    pub key: String,
    pub weight: f64,
    pub state: PureState,
    pub planted: Option<Side>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub kind: FamilyKind,
    pub n: usize,
    pub members: Vec<FamilyMember>,
}

impl FamilySpec {
    /// Checks widths and renormalizes the weights.
    pub fn new(
        name: impl Into<String>,
        kind: FamilyKind,
        n: usize,
        mut members: Vec<FamilyMember>,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidState("empty family".into()));
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if members
            .iter()
            .any(|m| m.weight < 0.0 || !m.weight.is_finite())
            || total <= 0.0
        {
            return Err(Error::InvalidState(
                "family weights must be nonnegative with positive sum".into(),
            ));
        }
        for m in &mut members {
            if m.state.n_qubits() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: m.state.n_qubits(),
                });
            }
            m.weight /= total;
        }
        Ok(Self {
            name: name.into(),
            kind,
            n,
            members,
        })
    }

    /// Equal weights; keys are member positions.
    pub fn uniform(
        name: impl Into<String>,
        kind: FamilyKind,
        n: usize,
        states: Vec<(PureState, Option<Side>)>,
    ) -> Result<Self> {
        let members = states
            .into_iter()
            .enumerate()
            .map(|(i, (state, planted))| FamilyMember {
                key: i.to_string(),
                weight: 1.0,
                state,
                planted,
            })
            .collect();
        Self::new(name, kind, n, members)
    }

    pub fn states(&self) -> Vec<PureState> {
        self.members.iter().map(|m| m.state.clone()).collect()
    }

    /// Weighted average of the members selected by `pick`, renormalized;
    /// `None` if the selection is empty.
    pub fn conditional_average(&self, pick: impl Fn(usize) -> bool) -> Option<CMatrix> {
        let d = 1usize << self.n;
        let mut m = CMatrix::zeros(d, d);
        let mut w = 0.0;
        for (i, mem) in self.members.iter().enumerate() {
            if pick(i) {
                m += linalg::outer(mem.state.amplitudes()) * C64::from(mem.weight);
                w += mem.weight;
            }
        }
        (w > 0.0).then(|| m / C64::from(w))
    }

    /// `ρ = Σ_k p_k |ψ_k⟩⟨ψ_k|`.
    pub fn average(&self) -> Result<DensityOperator> {
        let m = self.conditional_average(|_| true).expect("nonempty family");
        DensityOperator::new(self.members[0].state.layout().clone(), m)
    }
}
