//! Random-search oracle for quadratic forms over a fidelity ball, used to
//! cross-check the smoothing solver from the other side.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::linalg::{self, CMatrix, CVector, C64};
use crate::rng::rng_from_seed;

/// Best `⟨φ|M|φ⟩` found among `samples` unit vectors with `|⟨ψ|φ⟩|² ≥ c`.
///
/// A tenth of the draws are uniform; the rest perturb the incumbent with a
/// step adapted to the success rate, alternating additive steps with
/// multiplicative ones in the eigenbasis of `M` (needed when `M` is badly
/// conditioned). The result is feasible, so it bounds the true optimum from
/// the inside.
pub fn ball_search(
    m: &CMatrix,
    psi: &CVector,
    c: f64,
    samples: usize,
    seed: u64,
    minimize: bool,
) -> f64 {
    let d = psi.len();
    let mut rng = rng_from_seed(seed);
    let eval = |v: &CVector| v.dotc(&(m * v)).re;
    let better = |a: f64, b: f64| if minimize { a < b } else { a > b };
    let into_ball = |w: &CVector| -> Option<CVector> {
        let w = w / C64::from(w.norm());
        let along = psi.dotc(&w);
        if along.norm_sqr() >= c {
            return Some(w);
        }
        let mut perp = &w - psi * along;
        let pn = perp.norm();
        if pn < 1e-300 {
            return None;
        }
        perp /= C64::from(pn);
        let phase = if along.norm() > 0.0 {
            along / along.norm()
        } else {
            C64::from(1.0)
        };
        Some(psi * (phase * c.sqrt()) + perp * C64::from((1.0 - c).sqrt()))
    };
    let (_, vecs) = linalg::hermitian_eigen(m);
    let mut best_v = psi.clone();
    let mut best = eval(psi);
    let mut sigma = 0.3;
    for i in 0..samples {
        let noise = CVector::from_fn(d, |_, _| {
            C64::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        });
        let global = i < samples / 10;
        let w = if global {
            noise
        } else if i % 2 == 0 {
            &best_v + noise * C64::from(sigma / (2.0 * d as f64).sqrt())
        } else {
            let mut coords = vecs.adjoint() * &best_v;
            for (z, g) in coords.iter_mut().zip(noise.iter()) {
                *z *= C64::new(0.0, sigma * g.im).exp() * (sigma * g.re).exp();
            }
            &vecs * coords
        };
        let Some(v) = into_ball(&w) else { continue };
        let val = eval(&v);
        if better(val, best) {
            best = val;
            best_v = v;
            if !global {
                sigma = (sigma * 1.5).min(1.0);
            }
        } else if !global {
            sigma = (sigma * 0.9).max(1e-9);
        }
    }
    best
}
