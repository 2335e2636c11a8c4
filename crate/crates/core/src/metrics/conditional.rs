//! Conditional min-entropy `H_min(A|B) = −log₂ min_σ λ_max((I⊗σ)^{-1/2} ρ (I⊗σ)^{-1/2})`.
//!
//! The map `σ ↦ 1/λ_max(…)` is a pointwise minimum of functions linear in
//! `σ`, hence concave; it is maximized by exponentiated-gradient ascent on
//! the density-operator simplex. A dual bound from the averaged ascent
//! directions certifies how far the best iterate is from the optimum.

use super::entropy::{
    smooth_min_lb_with_budget, Certificate, ConditionalCertificate, EntropyKind, EntropyReport,
};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, C64};
use crate::qstate::DensityOperator;

pub const MAX_ITERATIONS: usize = 500;
pub const STEP: f64 = 0.1;
/// Largest accepted gap, in bits, between primal value and dual bound.
pub const GAP_TOLERANCE_BITS: f64 = 0.02;
/// Largest B dimension handled by the default solver.
pub const MAX_B_DIM: usize = 16;

struct Problem {
    rho: CMatrix,
    da: usize,
    db: usize,
}

struct Eval {
    objective: f64,
    /// Top eigenvector mapped back, `(I⊗σ^{-1/2}) v`.
    witness: linalg::CVector,
}

impl Problem {
    fn evaluate(&self, sigma: &CMatrix) -> Eval {
        let inv_sqrt =
            linalg::hermitian_fn(sigma, |x| if x > 1e-300 { 1.0 / x.sqrt() } else { 0.0 });
        let s = linalg::kron(&linalg::identity(self.da), &inv_sqrt);
        let x = &s * &self.rho * &s;
        let (vals, vecs) = linalg::hermitian_eigen(&x);
        let v = vecs.column(0).clone_owned();
        Eval {
            objective: vals[0].max(0.0),
            witness: &s * v,
        }
    }

    fn marginal_b(&self, psi: &linalg::CVector) -> CMatrix {
        let mut out = CMatrix::zeros(self.db, self.db);
        for a in 0..self.da {
            for j in 0..self.db {
                let b = psi[a * self.db + j].conj();
                for i in 0..self.db {
                    out[(i, j)] += psi[a * self.db + i] * b;
                }
            }
        }
        out
    }
}

/// Conditional min-entropy of `ρ_AB` split into the named A and B registers.
/// For `ε > 0` the input is first smoothed by removing its largest
/// eigenvalues (mass at most `ε/2`) and the better of the smoothed and
/// unsmoothed values is reported.
pub fn conditional_min_entropy<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    b: &[S],
    eps: f64,
) -> Result<EntropyReport> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::OutOfRange(format!("smoothing parameter {eps}")));
    }
    let mut order: Vec<String> = a.iter().map(|s| s.as_ref().to_string()).collect();
    order.extend(b.iter().map(|s| s.as_ref().to_string()));
    let reduced = if order.len() == rho.layout().registers().len() {
        rho.clone()
    } else {
        rho.partial_trace(&order)?
    };
    let ordered = reduced.reorder(&order)?;
    let a_qubits: usize = a
        .iter()
        .map(|s| rho.layout().register_qubits(s.as_ref()))
        .sum::<Result<usize>>()?;
    let da = 1usize << a_qubits;
    let db = ordered.dim() / da;
    if db > MAX_B_DIM {
        return Err(Error::OutOfRange(format!(
            "B dimension {db} exceeds {MAX_B_DIM}"
        )));
    }
    let mut best = solve(&Problem {
        rho: ordered.matrix().clone(),
        da,
        db,
    })?;
    if eps > 0.0 {
        let spec = ordered.spectral();
        let cut = smooth_min_lb_with_budget(&spec.eigenvalues, eps / 2.0, Some(eps));
        if let Some(Certificate::Smoothing(sc)) = &cut.certificate {
            if sc.removed_count > 0 {
                let kept: f64 = 1.0 - sc.removed_mass;
                let proj = spec.projector(|j, _| j >= sc.removed_count);
                let smoothed = (&proj * ordered.matrix() * &proj).scale(1.0 / kept);
                let mut alt = solve(&Problem {
                    rho: smoothed,
                    da,
                    db,
                })?;
                if alt.objective < best.objective {
                    alt.smoothing = Some(sc.clone());
                    best = alt;
                }
            }
        }
    }
    Ok(EntropyReport {
        kind: EntropyKind::ConditionalMin,
        value: -best.objective.log2(),
        epsilon: if eps > 0.0 { Some(eps) } else { None },
        certificate: Some(Certificate::Conditional(best)),
    })
}

fn solve(p: &Problem) -> Result<ConditionalCertificate> {
    let db = p.db;
    let mut log_sigma = CMatrix::zeros(db, db);
    let mut sigma = linalg::identity(db).scale(1.0 / db as f64);
    let mut best_sigma = sigma.clone();
    let mut best = p.evaluate(&sigma);
    let mut witnesses: Vec<linalg::CVector> = Vec::with_capacity(MAX_ITERATIONS);
    let mut iterations = 0;
    let mut stalled = 0;
    for t in 1..=MAX_ITERATIONS {
        iterations = t;
        let e = p.evaluate(&sigma);
        if e.objective < best.objective - 1e-10 * best.objective.max(1e-300) {
            stalled = 0;
        } else {
            stalled += 1;
        }
        if e.objective < best.objective {
            best_sigma = sigma.clone();
            best = Eval {
                objective: e.objective,
                witness: e.witness.clone(),
            };
        }
        if e.objective <= 0.0 {
            break;
        }
        witnesses.push(e.witness.clone() / C64::from(e.objective.sqrt()));
        // Ascent direction: marginal of the witness, which has ⟨σ, Γ⟩ = 1.
        let gamma = p.marginal_b(&e.witness);
        let eta = STEP / (t as f64).sqrt();
        log_sigma += gamma.scale(eta);
        sigma = exp_normalized(&log_sigma);
        if stalled >= 100 && t >= 200 {
            break;
        }
    }
    let mut grid_objective = None;
    if db == 2 {
        let (g_sigma, g_obj) = bloch_grid(p);
        grid_objective = Some(g_obj);
        if g_obj < best.objective {
            best = p.evaluate(&g_sigma);
            best_sigma = g_sigma;
        }
    }
    let dual = dual_bound(p, &witnesses, &best.witness);
    if best.objective > 0.0 && dual > 0.0 {
        let gap = (best.objective / dual).log2();
        if gap > GAP_TOLERANCE_BITS {
            return Err(Error::Solver(format!(
                "conditional min-entropy gap {gap:.3e} bits after {iterations} iterations"
            )));
        }
    }
    Ok(ConditionalCertificate {
        sigma_b: best_sigma,
        objective: best.objective,
        dual_bound: dual,
        iterations,
        grid_objective,
        smoothing: None,
    })
}

fn exp_normalized(log_sigma: &CMatrix) -> CMatrix {
    let top = linalg::lambda_max(log_sigma);
    let e = linalg::hermitian_fn(log_sigma, |x| (x - top).exp());
    let tr = e.trace().re;
    e.scale(1.0 / tr)
}

/// Any `W ≥ 0` with `Tr_A W = I_B` gives `Tr(ρW) ≤` the optimal objective.
/// `W` is built from the averaged witnesses of the second half of the run
/// and from the best witness alone; the larger bound is returned.
fn dual_bound(p: &Problem, witnesses: &[linalg::CVector], best: &linalg::CVector) -> f64 {
    let mut candidates: Vec<CMatrix> = Vec::new();
    let half = witnesses.len() / 2;
    if witnesses.len() > half && !witnesses.is_empty() {
        let mut w = CMatrix::zeros(p.rho.nrows(), p.rho.nrows());
        for v in &witnesses[half..] {
            w += linalg::outer(v);
        }
        candidates.push(w);
    }
    candidates.push(linalg::outer(best));
    let mut bound = 0.0f64;
    for w in candidates {
        let q = partial_trace_a(&w, p.da, p.db);
        let (vals, _) = linalg::hermitian_eigen(&q);
        if vals.last().copied().unwrap_or(0.0) < 1e-12 {
            // Rank-deficient marginal: rescale instead of whitening.
            let top = vals[0];
            if top > 0.0 {
                bound = bound.max((&p.rho * &w).trace().re / top);
            }
            continue;
        }
        let q_inv_sqrt = linalg::hermitian_fn(&q, |x| 1.0 / x.sqrt());
        let s = linalg::kron(&linalg::identity(p.da), &q_inv_sqrt);
        let wn = &s * &w * &s;
        bound = bound.max((&p.rho * wn).trace().re);
    }
    bound
}

fn partial_trace_a(w: &CMatrix, da: usize, db: usize) -> CMatrix {
    let mut out = CMatrix::zeros(db, db);
    for a in 0..da {
        for j in 0..db {
            for i in 0..db {
                out[(i, j)] += w[(a * db + i, a * db + j)];
            }
        }
    }
    out
}

fn bloch_state(x: f64, y: f64, z: f64) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + z), 0.0),
            c(0.5 * x, -0.5 * y),
            c(0.5 * x, 0.5 * y),
            c(0.5 * (1.0 - z), 0.0),
        ],
    )
}

/// Coarse-to-fine grid over the interior of the Bloch ball, refined around
/// the best point down to resolution 0.001.
fn bloch_grid(p: &Problem) -> (CMatrix, f64) {
    let mut center = [0.0f64; 3];
    let mut best = f64::INFINITY;
    for &(step, half_width) in &[(0.1f64, 1.0f64), (0.02, 0.1), (0.005, 0.02), (0.001, 0.005)] {
        let steps = (half_width / step).round() as i64;
        let mut local_best = center;
        for ix in -steps..=steps {
            for iy in -steps..=steps {
                for iz in -steps..=steps {
                    let (x, y, z) = (
                        center[0] + ix as f64 * step,
                        center[1] + iy as f64 * step,
                        center[2] + iz as f64 * step,
                    );
                    let r2 = x * x + y * y + z * z;
                    if r2 >= 0.999_999 {
                        continue;
                    }
                    let obj = p.evaluate(&bloch_state(x, y, z)).objective;
                    if obj < best {
                        best = obj;
                        local_best = [x, y, z];
                    }
                }
            }
        }
        center = local_best;
    }
    (bloch_state(center[0], center[1], center[2]), best)
}
