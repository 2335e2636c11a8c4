//! Entropic EFI from an EFI pair, and the weak-EFI parameter check.

use serde::{Deserialize, Serialize};

use super::generator::{EfiPairSpec, GenOp, GeneratorSpec, PairMeasurements};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::metrics::von_neumann;
use crate::qstate::RegisterLayout;

/// Gap below which an entropic pair counts as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropicEfi {
    /// `(σ0, σ1)` generators; the cached entropies are `S(σ0)`, `S(σ1)`.
    pub pair: EfiPairSpec,
    /// Measurements of the source pair `(ρ0, ρ1)`.
    pub source: PairMeasurements,
    pub gap: f64,
    /// `|S(σ0) − (S(ρ0)+S(ρ1))/2 − 1|`.
    pub formula_residual: f64,
    pub degenerate: bool,
}

impl EntropicEfi {
    pub fn s_sigma0(&self) -> f64 {
        self.pair.measured.s0
    }

    pub fn s_sigma1(&self) -> f64 {
        self.pair.measured.s1
    }

    /// Output width of `σ_b`.
    pub fn n_qubits(&self) -> usize {
        self.pair.gen0.output_qubits()
    }
}

/// Each generator as a unitary on (output ⊗ its traced qubits), padded with
/// identity to `w` traced qubits.
fn padded_unitary(gen: &GeneratorSpec, w: usize) -> Result<CMatrix> {
    let g = gen.output_first()?;
    let t = g.n_qubits() - g.output_qubits();
    let u = g.unitary();
    Ok(if w > t {
        linalg::kron(&u, &linalg::identity(1 << (w - t)))
    } else {
        u
    })
}

/// σ0 = ½|0⟩⟨0|⊗ρ0 + ½|1⟩⟨1|⊗ρ1 and σ1 = I/2 ⊗ (ρ0+ρ1)/2, both as circuits:
/// a control bit `B` selects which generator runs on `C ⊗ W`, and `A` is a
/// copy of `B` (for σ0) or an independent uniform bit purified by `R` (for σ1).
pub fn entropic_efi(pair: &EfiPairSpec) -> Result<EntropicEfi> {
    let n = pair.gen0.output_qubits();
    if pair.gen1.output_qubits() != n {
        return Err(Error::Layout(
            "pair generators have different output widths".into(),
        ));
    }
    let t0 = pair.gen0.n_qubits() - n;
    let t1 = pair.gen1.n_qubits() - n;
    let w = t0.max(t1);
    let u0 = padded_unitary(&pair.gen0, w)?;
    let u1 = padded_unitary(&pair.gen1, w)?;

    let mut regs: Vec<(&str, usize)> = vec![("A", 1), ("B", 1), ("C", n)];
    if w > 0 {
        regs.push(("W", w));
    }
    regs.push(("R", 1));
    let layout = RegisterLayout::new(regs)?;
    let (a, b, r) = (0, 1, layout.total_qubits() - 1);
    let block: Vec<usize> = (2..2 + n + w).collect();
    let select = GenOp::Select {
        control: b,
        qubits: block,
        if_zero: u0,
        if_one: u1,
    };
    let mut traced: Vec<String> = vec!["B".into()];
    if w > 0 {
        traced.push("W".into());
    }
    traced.push("R".into());
    let output = vec!["A".to_string(), "C".to_string()];

    let ops0 = vec![
        GenOp::H { q: b },
        GenOp::Cnot {
            control: b,
            target: a,
        },
        select.clone(),
    ];
    let ops1 = vec![
        GenOp::H { q: r },
        GenOp::Cnot {
            control: r,
            target: a,
        },
        GenOp::H { q: b },
        select,
    ];
    let g0 = GeneratorSpec::new(
        "sigma0",
        layout.clone(),
        ops0,
        output.clone(),
        traced.clone(),
    )?;
    let g1 = GeneratorSpec::new("sigma1", layout, ops1, output, traced)?;
    let out = EfiPairSpec::new(format!("entropic({})", pair.label), g0, g1)?;

    let (rho0, rho1) = pair.states()?;
    let source = PairMeasurements {
        distance: pair.measured.distance,
        s0: von_neumann(&rho0),
        s1: von_neumann(&rho1),
    };
    let gap = out.measured.s1 - out.measured.s0;
    let formula_residual = (out.measured.s0 - (source.s0 + source.s1) / 2.0 - 1.0).abs();
    Ok(EntropicEfi {
        pair: out,
        source,
        gap,
        formula_residual,
        degenerate: gap < DEGENERATE_GAP,
    })
}

/// Tolerances standing in for "negligible" and "inverse polynomial".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakEfiTolerances {
    /// Values at or below this count as negligible.
    pub negl: f64,
    /// Values at or above this count as inverse-polynomially large.
    pub inv_poly: f64,
}

impl Default for WeakEfiTolerances {
    fn default() -> Self {
        Self {
            negl: 0.01,
            inv_poly: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakEfiCheck {
    pub eps: f64,
    pub delta: f64,
    pub tolerances: WeakEfiTolerances,
    /// ε negligible and 1 − δ inverse-polynomial.
    pub range_far: bool,
    /// 1 − ε inverse-polynomial and δ negligible.
    pub range_hidden: bool,
    /// `(1−ε)² − √δ`; the universal constant it must exceed is left to the caller.
    pub range_constant_value: f64,
}

impl WeakEfiCheck {
    pub fn range_constant_holds(&self, c: f64) -> bool {
        self.range_constant_value >= c
    }
}

/// Classifies `(ε, δ)` against the three parameter ranges under which a weak
/// pair amplifies to a standard one.
pub fn check_weak_efi(eps: f64, delta: f64, tol: WeakEfiTolerances) -> Result<WeakEfiCheck> {
    if !(0.0..=1.0).contains(&eps) || !(0.0..=1.0).contains(&delta) {
        return Err(Error::OutOfRange(format!(
            "weak EFI parameters ({eps}, {delta}) outside [0, 1]"
        )));
    }
    Ok(WeakEfiCheck {
        eps,
        delta,
        tolerances: tol,
        range_far: eps <= tol.negl && 1.0 - delta >= tol.inv_poly,
        range_hidden: 1.0 - eps >= tol.inv_poly && delta <= tol.negl,
        range_constant_value: (1.0 - eps).powi(2) - delta.sqrt(),
    })
}

/// Weak-EFI parameters of a concrete pair: ε = 1 − D(ρ0, ρ1), and δ the
/// advantage of a fixed distinguisher.
pub fn weak_efi_from_pair(
    pair: &EfiPairSpec,
    projector: &CMatrix,
    tol: WeakEfiTolerances,
) -> Result<WeakEfiCheck> {
    let (rho0, rho1) = pair.states()?;
    let delta = crate::metrics::advantage(&rho0, &rho1, projector)?;
    check_weak_efi(
        (1.0 - pair.measured.distance).clamp(0.0, 1.0),
        delta.clamp(0.0, 1.0),
        tol,
    )
}
