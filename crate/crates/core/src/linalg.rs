//! Dense complex linear algebra shared by every module.
//!
//! Qubit ordering is big-endian: in an `n`-qubit register qubit 0 is the
//! most significant bit of the computational-basis index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Base-2 logarithm with the convention used for entropies.
pub fn log2(x: f64) -> f64 {
    x.log2()
}

/// `-x log2 x` with `0 log 0 = 0`.
pub fn xlogx_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    xlogx_neg(p) + xlogx_neg(1.0 - p)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `(m + m†)/2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
/// Each eigenvector has its first component of modulus above `1e-9`
/// rotated to the positive real axis.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let d = m.nrows();
    if d == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    if d == 1 {
        return (vec![m[(0, 0)].re], identity(1));
    }
    // nalgebra's SymmetricEigen can return eigenpairs with O(1) residuals on
    // spectra with a large gap next to a near-zero cluster; faer is used
    // for every Hermitian eigenproblem instead.
    let eig = to_faer(&symmetrize(m))
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("Hermitian eigendecomposition did not converge");
    let (s, u) = (eig.S(), eig.U());
    // faer sorts ascending.
    let values: Vec<f64> = (0..d).rev().map(|i| s[i].re).collect();
    let mut vectors = CMatrix::from_fn(d, d, |r, col| {
        let z = u[(r, d - 1 - col)];
        c(z.re, z.im)
    });
    for mut col in vectors.column_iter_mut() {
        fix_phase(&mut col);
    }
    (values, vectors)
}

fn to_faer(m: &CMatrix) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |r, col| {
        let z = m[(r, col)];
        faer::c64::new(z.re, z.im)
    })
}

/// Rotate `v` so that its first non-negligible component is positive real.
pub fn fix_phase<S>(v: &mut nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>)
where
    S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>,
{
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-9).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![m[(0, 0)].re];
    }
    let mut vals = to_faer(&symmetrize(m))
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("Hermitian eigendecomposition did not converge");
    vals.reverse();
    vals
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD did not converge")
}

/// `X` with `X X† = m` for a positive semidefinite `m`: the eigenvectors of
/// the eigenvalues above `cutoff`, scaled by their square roots.
pub fn psd_factor(m: &CMatrix, cutoff: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let r = vals.iter().take_while(|&&l| l > cutoff).count();
    CMatrix::from_fn(m.nrows(), r, |i, j| vecs[(i, j)] * vals[j].sqrt())
}

/// Apply a function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d = m.nrows();
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let s = f(l);
        for i in 0..d {
            scaled[(i, j)] *= s;
        }
    }
    scaled * vecs.adjoint()
}

/// Square root of a positive semidefinite matrix (negative noise clamped).
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_fn(m, |x| x.max(0.0).sqrt())
}

/// Schatten 1-norm of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum()
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Bit mask inside an `n`-qubit index for qubit `q`.
#[inline]
pub fn qubit_mask(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}

/// Spread the low bits of `value` over the positions of `qubits` (in order,
/// first qubit most significant) inside an `n`-qubit index.
pub fn deposit(value: usize, qubits: &[usize], n: usize) -> usize {
    let k = qubits.len();
    let mut out = 0usize;
    for (pos, &q) in qubits.iter().enumerate() {
        if (value >> (k - 1 - pos)) & 1 == 1 {
            out |= qubit_mask(n, q);
        }
    }
    out
}

/// Offsets of all `2^k` sub-indices over `qubits`.
pub fn offsets(qubits: &[usize], n: usize) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|v| deposit(v, qubits, n))
        .collect()
}

/// Complement of `qubits` in `0..n`, ascending.
pub fn complement(qubits: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|q| !qubits.contains(q)).collect()
}

/// Apply the `2^k × 2^k` matrix `u` to the qubits `targets` of a state
/// vector on `n` qubits, in place.
pub fn apply_to_slice(amps: &mut [C64], n: usize, targets: &[usize], u: &CMatrix) {
    let k = targets.len();
    let dk = 1usize << k;
    debug_assert_eq!(u.nrows(), dk);
    let target_offsets = offsets(targets, n);
    let rest = complement(targets, n);
    let rest_offsets = offsets(&rest, n);
    let mut buf = vec![ZERO; dk];
    for &base in &rest_offsets {
        for (s, &o) in target_offsets.iter().enumerate() {
            buf[s] = amps[base + o];
        }
        for (r, &o) in target_offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (s, b) in buf.iter().enumerate() {
                acc += u[(r, s)] * b;
            }
            amps[base + o] = acc;
        }
    }
}

/// `u` acting on `targets` of every column of `m` (left multiplication).
pub fn apply_left(m: &mut CMatrix, n: usize, targets: &[usize], u: &CMatrix) {
    let d = m.nrows();
    for col in m.as_mut_slice().chunks_mut(d) {
        apply_to_slice(col, n, targets, u);
    }
}

/// `u m u†` with `u` acting on `targets` of an `n`-qubit operator.
pub fn conjugate_on(m: &CMatrix, n: usize, targets: &[usize], u: &CMatrix) -> CMatrix {
    let mut left = m.clone();
    apply_left(&mut left, n, targets, u);
    let mut right = left.adjoint();
    apply_left(&mut right, n, targets, u);
    right.adjoint()
}

/// Partial trace keeping `keep` (absolute qubit indices, ascending) of an
/// `n`-qubit operator.
pub fn partial_trace_qubits(m: &CMatrix, n: usize, keep: &[usize]) -> CMatrix {
    let traced = complement(keep, n);
    let keep_off = offsets(keep, n);
    let tr_off = offsets(&traced, n);
    let dk = keep_off.len();
    let mut out = CMatrix::zeros(dk, dk);
    for j in 0..dk {
        for i in 0..dk {
            let mut acc = ZERO;
            for &t in &tr_off {
                acc += m[(keep_off[i] + t, keep_off[j] + t)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Reduced operator of a pure state on `keep`, without forming `|ψ⟩⟨ψ|`.
pub fn reduced_from_vector(v: &[C64], n: usize, keep: &[usize]) -> CMatrix {
    let traced = complement(keep, n);
    let keep_off = offsets(keep, n);
    let tr_off = offsets(&traced, n);
    let dk = keep_off.len();
    let mut out = CMatrix::zeros(dk, dk);
    for &t in &tr_off {
        for j in 0..dk {
            let b = v[keep_off[j] + t].conj();
            if b == ZERO {
                continue;
            }
            for i in 0..dk {
                out[(i, j)] += v[keep_off[i] + t] * b;
            }
        }
    }
    out
}

/// Matrix of the permutation that reorders qubits: output qubit `i` is
/// input qubit `order[i]`.
pub fn permute_qubits(m: &CMatrix, n: usize, order: &[usize]) -> CMatrix {
    let d = 1usize << n;
    let map: Vec<usize> = (0..d).map(|i| permute_index(i, n, order)).collect();
    let mut out = CMatrix::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            out[(i, j)] = m[(map[i], map[j])];
        }
    }
    out
}

/// Input index corresponding to output index `i` under `order`.
pub fn permute_index(i: usize, n: usize, order: &[usize]) -> usize {
    let mut src = 0usize;
    for (pos, &q) in order.iter().enumerate() {
        if i & qubit_mask(n, pos) != 0 {
            src |= qubit_mask(n, q);
        }
    }
    src
}

/// Orthonormal basis of the column span of `m`, singular values above `cutoff`.
pub fn column_span(m: &CMatrix, cutoff: f64) -> CMatrix {
    if m.ncols() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let gram = m * m.adjoint();
    let (vals, vecs) = hermitian_eigen(&gram);
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i] > cutoff * cutoff)
        .collect();
    let mut out = CMatrix::zeros(m.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &vecs.column(i));
    }
    out
}

/// Canonical orthonormal basis of the subspace spanned by the columns of
/// the isometry `v`: projections of computational basis vectors taken in
/// order and Gram-Schmidt orthonormalized, each phase-fixed.
pub fn canonical_basis(v: &CMatrix) -> CMatrix {
    let d = v.nrows();
    let k = v.ncols();
    let mut chosen: Vec<CVector> = Vec::with_capacity(k);
    for e in 0..d {
        if chosen.len() == k {
            break;
        }
        let coeffs: CVector = v.row(e).adjoint();
        let mut w = v * coeffs;
        for b in &chosen {
            let proj = b.dotc(&w);
            w -= b * proj;
        }
        let norm = w.norm();
        if norm > 1e-6 {
            w /= C64::from(norm);
            fix_phase(&mut w);
            chosen.push(w);
        }
    }
    let mut out = CMatrix::zeros(d, chosen.len());
    for (i, b) in chosen.iter().enumerate() {
        out.set_column(i, b);
    }
    out
}

/// A unitary whose first column is the unit vector `v`: `v` followed by
/// the Gram-Schmidt completion over the computational basis.
pub fn unitary_with_first_column(v: &CVector) -> CMatrix {
    let d = v.len();
    let mut cols: Vec<CVector> = vec![v / C64::from(v.norm())];
    for e in 0..d {
        if cols.len() == d {
            break;
        }
        let mut w = CVector::from_element(d, C64::from(0.0));
        w[e] = ONE;
        for b in &cols {
            let p = b.dotc(&w);
            w -= b * p;
        }
        let norm = w.norm();
        if norm > 1e-6 {
            cols.push(w / C64::from(norm));
        }
    }
    CMatrix::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deposit_places_bits_big_endian() {
        assert_eq!(deposit(0b1, &[0], 2), 0b10);
        assert_eq!(deposit(0b10, &[1, 0], 2), 0b01);
        assert_eq!(offsets(&[1], 2), vec![0, 1]);
    }

    #[test]
    fn eigen_is_descending_and_reconstructs() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.2), c(0.0, -0.2), c(0.5, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!(vals[0] >= vals[1]);
        let mut diag = CMatrix::zeros(2, 2);
        diag[(0, 0)] = c(vals[0], 0.0);
        diag[(1, 1)] = c(vals[1], 0.0);
        let back = &vecs * diag * vecs.adjoint();
        assert!(max_abs(&(back - m)) < 1e-12);
    }

    #[test]
    fn conjugation_matches_kron() {
        let h = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, -ONE]).scale(1.0 / 2f64.sqrt());
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = ONE;
        let direct = kron(&identity(2), &h) * &m * kron(&identity(2), &h).adjoint();
        assert!(max_abs(&(conjugate_on(&m, 2, &[1], &h) - direct)) < 1e-14);
    }

    #[test]
    fn permutation_swaps_qubits() {
        let mut m = CMatrix::zeros(4, 4);
        m[(1, 1)] = ONE; // |01⟩⟨01|
        let p = permute_qubits(&m, 2, &[1, 0]);
        assert_eq!(p[(2, 2)], ONE);
    }
}
