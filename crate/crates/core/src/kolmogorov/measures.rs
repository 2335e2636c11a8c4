//! Complexity measures relative to a [`UniversalMixture`].

use serde::{Deserialize, Serialize};

use super::mixture::UniversalMixture;
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};
use crate::metrics::Divergence;
use crate::qstate::PureState;

/// Fidelity slack when matching program outputs.
pub const FIDELITY_TOL: f64 = 1e-9;
/// Eigenvalues of `μ` at or below this are outside its support.
pub const SUPPORT_CUTOFF: f64 = 1e-14;
/// Weight outside the support tolerated before `U_min` is declared infinite.
pub const LEAKAGE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "bits", rename_all = "snake_case")]
pub enum Knet {
    Bits(usize),
    /// No program of length `≤ l_max` reaches the target fidelity.
    AboveCap(usize),
}

impl Knet {
    pub fn bits(&self) -> Option<usize> {
        match self {
            Knet::Bits(b) => Some(*b),
            Knet::AboveCap(_) => None,
        }
    }
}

/// Length of the shortest table program whose output has fidelity at least
/// `1 − ε` with `ψ`.
pub fn knet(mu: &UniversalMixture, psi: &PureState, eps: f64) -> Result<Knet> {
    mu.check_state(psi)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::OutOfRange(format!(
            "fidelity slack {eps} outside [0, 1)"
        )));
    }
    for e in mu.program_table() {
        if e.state.fidelity(psi)? >= 1.0 - eps - FIDELITY_TOL {
            return Ok(Knet::Bits(e.code.len()));
        }
    }
    Ok(Knet::AboveCap(mu.l_max))
}

/// `ψ` in the eigenbasis of `μ`, eigenvalues descending.
fn eigen_coords(mu: &UniversalMixture, psi: &PureState) -> Result<(Vec<f64>, CVector)> {
    mu.check_state(psi)?;
    let spec = mu.spectral();
    Ok((
        spec.eigenvalues.clone(),
        spec.eigenvectors.adjoint() * psi.amplitudes(),
    ))
}

/// `H̄(ψ) = −log₂ ⟨ψ|μ|ψ⟩`.
pub fn hbar(mu: &UniversalMixture, psi: &PureState) -> Result<f64> {
    mu.check_state(psi)?;
    let v = psi.amplitudes();
    let e = v.dotc(&(mu.matrix() * v)).re;
    Ok(if e > 0.0 { -e.log2() } else { f64::INFINITY })
}

/// `U_min(ψ) = log₂ ⟨ψ|μ^{-1}|ψ⟩`, with the inverse taken on the support of
/// `μ` and infinity reported when `ψ` leaks out of it.
pub fn umin(mu: &UniversalMixture, psi: &PureState) -> Result<Divergence> {
    let (vals, coords) = eigen_coords(mu, psi)?;
    let mut leakage = 0.0;
    let mut acc = 0.0;
    for (l, z) in vals.iter().zip(coords.iter()) {
        if *l > SUPPORT_CUTOFF {
            acc += z.norm_sqr() / l;
        } else {
            leakage += z.norm_sqr();
        }
    }
    Ok(if leakage > LEAKAGE_TOL {
        Divergence::Infinite { leakage }
    } else {
        Divergence::Finite { bits: acc.log2() }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothCase {
    /// `ε = 0`: no smoothing.
    Exact,
    /// The lowest eigenspace already carries enough of `ψ`.
    Eigenspace,
    /// Multiplier strictly below the lowest eigenvalue.
    Boundary,
    /// `ψ` orthogonal to the lowest eigenspace; optimum mixes in that space.
    Hard,
    /// No feasible state (the overlap bound exceeds the support weight).
    Infeasible,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothResult {
    pub bits: f64,
    /// Optimal quadratic form `⟨φ|M|φ⟩`.
    pub value: f64,
    pub overlap: f64,
    pub lambda: f64,
    /// `‖(M − λ)φ − νψ‖ / λ_max(M)`.
    pub kkt_residual: f64,
    pub case: SmoothCase,
    #[serde(skip)]
    pub phi: Option<PureState>,
}

/// Overlap target `c` for pure states at trace distance `ε`: `1 − ε²`.
pub fn overlap_target(eps: f64) -> f64 {
    1.0 - eps * eps
}

pub const BISECTION_STEPS: usize = 200;
pub const OVERLAP_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct BallSolution {
    pub value: f64,
    /// Optimizer in the same coordinates as the input.
    pub phi: Vec<C64>,
    pub lambda: f64,
    pub overlap: f64,
    pub kkt_residual: f64,
    pub case: SmoothCase,
}

/// Minimizes `Σ m_i |φ_i|²` over unit `φ` with `|⟨a|φ⟩|² ≥ c`, where `m`
/// is diagonal. Coordinates with infinite `m` are forbidden.
pub fn minimize_diagonal(m: &[f64], a: &[C64], c: f64) -> BallSolution {
    let d = m.len();
    let allowed: Vec<usize> = (0..d).filter(|&i| m[i].is_finite()).collect();
    let infeasible = || BallSolution {
        value: f64::INFINITY,
        phi: vec![C64::from(0.0); d],
        lambda: f64::NAN,
        overlap: 0.0,
        kkt_residual: 0.0,
        case: SmoothCase::Infeasible,
    };
    if allowed.is_empty() {
        return infeasible();
    }
    let mags: Vec<f64> = a.iter().map(|z| z.norm()).collect();
    let phase = |i: usize| {
        if mags[i] > 0.0 {
            a[i] / mags[i]
        } else {
            C64::from(1.0)
        }
    };
    let m0 = allowed.iter().map(|&i| m[i]).fold(f64::INFINITY, f64::min);
    let m_top = allowed
        .iter()
        .map(|&i| m[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let scale = (m_top - m0).max(m_top.abs()).max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let lowest: Vec<usize> = allowed
        .iter()
        .copied()
        .filter(|&i| m[i] - m0 <= tol)
        .collect();
    let p0: f64 = lowest.iter().map(|&i| mags[i] * mags[i]).sum();
    let support: f64 = allowed.iter().map(|&i| mags[i] * mags[i]).sum();

    let finish = |phi: Vec<C64>, lambda: f64, case: SmoothCase| {
        let value: f64 = (0..d)
            .filter(|&i| m[i].is_finite())
            .map(|i| m[i] * phi[i].norm_sqr())
            .sum();
        let ov: C64 = (0..d).map(|i| a[i].conj() * phi[i]).sum();
        let r: Vec<C64> = (0..d)
            .map(|i| {
                if m[i].is_finite() {
                    phi[i] * (m[i] - lambda)
                } else {
                    C64::from(0.0)
                }
            })
            .collect();
        let a_norm2: f64 = allowed.iter().map(|&i| a[i].norm_sqr()).sum();
        let nu: C64 = if a_norm2 > 0.0 {
            allowed.iter().map(|&i| a[i].conj() * r[i]).sum::<C64>() / a_norm2
        } else {
            C64::from(0.0)
        };
        let res: f64 = allowed
            .iter()
            .map(|&i| (r[i] - a[i] * nu).norm_sqr())
            .sum::<f64>()
            .sqrt();
        BallSolution {
            value,
            phi,
            lambda,
            overlap: ov.norm_sqr(),
            kkt_residual: res / m_top.abs().max(f64::MIN_POSITIVE),
            case,
        }
    };

    if p0 >= c - 1e-15 {
        let mut phi = vec![C64::from(0.0); d];
        if p0 > 0.0 {
            for &i in &lowest {
                phi[i] = a[i] / p0.sqrt();
            }
        } else {
            phi[lowest[0]] = C64::from(1.0);
        }
        return finish(phi, m0, SmoothCase::Eigenspace);
    }
    if support < c - 1e-15 {
        return infeasible();
    }
    // u_i ∝ |a_i| / (m_i − m0 + t) is the optimizer for multiplier
    // λ = m0 − t; the overlap f(t) grows with t. Rescaled by the largest
    // entry so tiny t neither overflows nor underflows.
    let u_of = |t: f64| -> Vec<f64> {
        let raw: Vec<f64> = (0..d)
            .map(|i| {
                if m[i].is_finite() {
                    mags[i] / (m[i] - m0 + t)
                } else {
                    0.0
                }
            })
            .collect();
        let top = raw.iter().fold(0.0f64, |a, &b| a.max(b));
        if top > 0.0 && top.is_finite() {
            raw.iter().map(|x| x / top).collect()
        } else {
            raw
        }
    };
    let f_of = |u: &[f64]| -> f64 {
        let num: f64 = u.iter().zip(&mags).map(|(x, y)| x * y).sum();
        let den: f64 = u.iter().map(|x| x * x).sum();
        if den > 0.0 {
            num * num / den
        } else {
            0.0
        }
    };
    let mut lo = (scale * 1e-250).ln();
    let mut hi = scale.ln();
    let mut guard = 0;
    while f_of(&u_of(hi.exp())) < c && guard < 2000 {
        hi += std::f64::consts::LN_2 * 8.0;
        guard += 1;
    }
    if f_of(&u_of(lo.exp())) >= c {
        // Hard case: φ = αφ* + βe with e in the lowest eigenspace, ⊥ ψ.
        let u = u_of(lo.exp());
        let mut star: Vec<f64> = u.clone();
        for &i in &lowest {
            star[i] = 0.0;
        }
        let norm = star.iter().map(|x| x * x).sum::<f64>().sqrt();
        let f_star = f_of(&star);
        let mut phi = vec![C64::from(0.0); d];
        if norm > 0.0 && f_star > 0.0 {
            let alpha = (c / f_star).min(1.0).sqrt();
            let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
            for i in 0..d {
                phi[i] = phase(i) * (alpha * star[i] / norm);
            }
            let e = lowest
                .iter()
                .copied()
                .min_by(|&x, &y| mags[x].partial_cmp(&mags[y]).unwrap())
                .unwrap();
            phi[e] += C64::from(beta);
        }
        return finish(phi, m0, SmoothCase::Hard);
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if f_of(&u_of(mid.exp())) >= c {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let t = hi.exp();
    let u = u_of(t);
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let phi: Vec<C64> = (0..d).map(|i| phase(i) * (u[i] / norm)).collect();
    finish(phi, m0 - t, SmoothCase::Boundary)
}

fn smooth_common(
    mu: &UniversalMixture,
    psi: &PureState,
    eps: f64,
    inverse: bool,
) -> Result<SmoothResult> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::OutOfRange(format!(
            "smoothing radius {eps} outside [0, 1)"
        )));
    }
    let (vals, coords) = eigen_coords(mu, psi)?;
    let m: Vec<f64> = if inverse {
        vals.iter()
            .map(|&l| {
                if l > SUPPORT_CUTOFF {
                    1.0 / l
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    } else {
        vals.clone()
    };
    let a: Vec<C64> = coords.iter().copied().collect();
    let to_bits = |v: f64| if inverse { v.log2() } else { -v.log2() };
    if eps == 0.0 {
        let bits = if inverse {
            umin(mu, psi)?.value()
        } else {
            hbar(mu, psi)?
        };
        let value = if inverse { bits.exp2() } else { (-bits).exp2() };
        return Ok(SmoothResult {
            bits,
            value,
            overlap: 1.0,
            lambda: f64::NAN,
            kkt_residual: 0.0,
            case: SmoothCase::Exact,
            phi: Some(psi.clone()),
        });
    }
    let sol = minimize_diagonal(&m, &a, overlap_target(eps));
    let phi = if sol.case == SmoothCase::Infeasible {
        None
    } else {
        let v = &mu.spectral().eigenvectors * CVector::from_vec(sol.phi.clone());
        Some(PureState::normalized(psi.layout().clone(), v)?)
    };
    Ok(SmoothResult {
        bits: if sol.case == SmoothCase::Infeasible {
            f64::INFINITY
        } else {
            to_bits(sol.value)
        },
        value: sol.value,
        overlap: sol.overlap,
        lambda: sol.lambda,
        kkt_residual: sol.kkt_residual,
        case: sol.case,
        phi,
    })
}

/// `H̄^ε(ψ)`: maximum of `H̄(φ)` over pure `φ` within trace distance `ε`.
pub fn hbar_smooth(mu: &UniversalMixture, psi: &PureState, eps: f64) -> Result<SmoothResult> {
    smooth_common(mu, psi, eps, false)
}

/// `U_min^ε(ψ)`: minimum of `U_min(φ)` over pure `φ` within trace distance `ε`.
pub fn umin_smooth(mu: &UniversalMixture, psi: &PureState, eps: f64) -> Result<SmoothResult> {
    smooth_common(mu, psi, eps, true)
}
