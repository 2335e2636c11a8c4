use rand::Rng as _;
use rand_distr::StandardNormal;

use super::density::DensityOperator;
use super::layout::{max_qubits, RegisterLayout};
use super::pure::PureState;
use super::unitary::UnitaryOperator;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, C64};
use crate::rng::{rng_from_seed, Rng};

fn gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-random vector of dimension `d` drawn from `rng`.
pub fn haar_vector(d: usize, rng: &mut Rng) -> CVector {
    let v = CVector::from_iterator(d, (0..d).map(|_| gaussian(rng)));
    let norm = v.norm();
    v / C64::from(norm)
}

/// Haar-random state on a single register `A` of `n` qubits.
pub fn sample_haar_state(n: usize, seed: u64) -> Result<PureState> {
    let mut rng = rng_from_seed(seed);
    haar_state_with(&RegisterLayout::single("A", check_n(n)?)?, &mut rng)
}

pub fn haar_state_with(layout: &RegisterLayout, rng: &mut Rng) -> Result<PureState> {
    PureState::new(layout.clone(), haar_vector(layout.dim(), rng))
}

fn check_n(n: usize) -> Result<usize> {
    if n == 0 || n > max_qubits() {
        return Err(Error::OutOfRange(format!(
            "qubit count {n} outside 1..={}",
            max_qubits()
        )));
    }
    Ok(n)
}

/// Haar-random unitary via QR of a Ginibre matrix with phases fixed.
pub fn haar_unitary_matrix(d: usize, rng: &mut Rng) -> CMatrix {
    let g = CMatrix::from_iterator(d, d, (0..d * d).map(|_| gaussian(rng)));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q.clone();
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            C64::from(1.0)
        };
        for i in 0..d {
            out[(i, j)] = q[(i, j)] * phase;
        }
    }
    out
}

pub fn haar_unitary(layout: RegisterLayout, rng: &mut Rng) -> Result<UnitaryOperator> {
    let d = layout.dim();
    UnitaryOperator::new(layout, haar_unitary_matrix(d, rng))
}

/// Random density operator of the given rank (partial trace of a Haar
/// state on a larger space).
pub fn random_density(
    layout: &RegisterLayout,
    rank: usize,
    rng: &mut Rng,
) -> Result<DensityOperator> {
    let d = layout.dim();
    let rank = rank.clamp(1, d);
    let g = CMatrix::from_iterator(d, rank, (0..d * rank).map(|_| gaussian(rng)));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(layout.clone(), m.scale(1.0 / tr))
}

/// Random density operator with a uniformly random rank.
pub fn random_mixed(layout: &RegisterLayout, rng: &mut Rng) -> Result<DensityOperator> {
    let d = layout.dim();
    let rank = rng.gen_range(1..=d);
    random_density(layout, rank, rng)
}
