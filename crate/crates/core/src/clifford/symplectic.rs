//! Bijection between integers and symplectic matrices over GF(2).
//!
//! Vectors are interleaved `(x₁, z₁, x₂, z₂, …)` packed into a `u64`, bit `t`
//! holding coordinate `t`. A matrix is the list of its rows; row `2j` is the
//! image of `X_j` and row `2j+1` the image of `Z_j`. The construction builds
//! the image of the first qubit's pair with at most four symplectic
//! transvections and recurses on the remaining qubits.

use super::pauli::symplectic_inner;

/// Transvection `Z_k(v) = v + ⟨k, v⟩ k`.
#[inline]
pub fn transvection(k: u64, v: u64) -> u64 {
    if symplectic_inner(k, v) {
        v ^ k
    } else {
        v
    }
}

/// Two transvections `(h0, h1)` with `y = Z_{h1}(Z_{h0}(x))` for nonzero `x, y`.
pub fn find_transvection(x: u64, y: u64, n: usize) -> (u64, u64) {
    if x == y {
        return (0, 0);
    }
    if symplectic_inner(x, y) {
        return (x ^ y, 0);
    }
    let pair = |v: u64, i: usize| ((v >> (2 * i)) & 1, (v >> (2 * i + 1)) & 1);
    let mut z = 0u64;
    for i in 0..n {
        let (x0, x1) = pair(x, i);
        let (y0, y1) = pair(y, i);
        if (x0 | x1) != 0 && (y0 | y1) != 0 {
            let mut z0 = x0 ^ y0;
            let mut z1 = x1 ^ y1;
            if z0 == 0 && z1 == 0 {
                z1 = 1;
                if x0 != x1 {
                    z0 = 1;
                }
            }
            z |= (z0 << (2 * i)) | (z1 << (2 * i + 1));
            return (x ^ z, y ^ z);
        }
    }
    for i in 0..n {
        let (x0, x1) = pair(x, i);
        let (y0, y1) = pair(y, i);
        if (x0 | x1) != 0 && (y0 | y1) == 0 {
            let (z0, z1) = if x0 == x1 { (0, 1) } else { (x1, x0) };
            z |= (z0 << (2 * i)) | (z1 << (2 * i + 1));
            break;
        }
    }
    for i in 0..n {
        let (x0, x1) = pair(x, i);
        let (y0, y1) = pair(y, i);
        if (x0 | x1) == 0 && (y0 | y1) != 0 {
            let (z0, z1) = if y0 == y1 { (0, 1) } else { (y1, y0) };
            z |= (z0 << (2 * i)) | (z1 << (2 * i + 1));
            break;
        }
    }
    (x ^ z, y ^ z)
}

/// `|Sp(2n, 2)| = ∏_{j=1}^{n} (4^j − 1) 2^{2j−1}`.
pub fn symplectic_order(n: usize) -> u128 {
    (1..=n as u32)
        .map(|j| (4u128.pow(j) - 1) * 2u128.pow(2 * j - 1))
        .product()
}

/// The symplectic matrix with index `i < symplectic_order(n)`.
pub fn symplectic_from_index(mut i: u128, n: usize) -> Vec<u64> {
    let nn = 2 * n;
    let s = (1u128 << nn) - 1;
    let k = (i % s) as u64 + 1;
    i /= s;
    let f1 = k;
    let e1 = 1u64;
    let (t0, t1) = find_transvection(e1, f1, n);
    let bits = (i % (1u128 << (nn - 1))) as u64;
    let e_prime = e1 | ((bits & !1u64) << 1);
    let h0 = transvection(t1, transvection(t0, e_prime));
    let f1_eff = if bits & 1 == 1 { 0 } else { f1 };
    let mut g: Vec<u64> = vec![0b01, 0b10];
    if n > 1 {
        let sub = symplectic_from_index(i >> (nn - 1), n - 1);
        g.extend(sub.into_iter().map(|row| row << 2));
    }
    for row in g.iter_mut() {
        let mut v = transvection(t0, *row);
        v = transvection(t1, v);
        v = transvection(h0, v);
        v = transvection(f1_eff, v);
        *row = v;
    }
    g
}

/// Inverse of [`symplectic_from_index`]; `None` if `rows` is not symplectic.
pub fn symplectic_to_index(rows: &[u64], n: usize) -> Option<u128> {
    if rows.len() != 2 * n || !is_symplectic(rows, n) {
        return None;
    }
    index_unchecked(rows, n)
}

fn index_unchecked(rows: &[u64], n: usize) -> Option<u128> {
    let nn = 2 * n;
    let s = (1u128 << nn) - 1;
    let f1 = rows[0];
    if f1 == 0 {
        return None;
    }
    let part1 = (f1 - 1) as u128;
    let (t0, t1) = find_transvection(1, f1, n);
    let v = transvection(t0, transvection(t1, rows[1]));
    let mask = (1u64 << (nn - 1)) - 1;
    let bits = ((v & 1) | ((v >> 2) << 1)) & mask;
    let e_prime = 1 | ((bits & !1u64) << 1);
    let h0 = transvection(t1, transvection(t0, e_prime));
    let f1_eff = if bits & 1 == 1 { 0 } else { f1 };
    let base: Vec<u64> = rows
        .iter()
        .map(|&r| {
            transvection(
                t0,
                transvection(t1, transvection(h0, transvection(f1_eff, r))),
            )
        })
        .collect();
    if base[0] != 0b01 || base[1] != 0b10 {
        return None;
    }
    let sub_index = if n > 1 {
        let sub: Vec<u64> = base[2..].iter().map(|&r| r >> 2).collect();
        if base[2..].iter().any(|&r| r & 0b11 != 0) {
            return None;
        }
        index_unchecked(&sub, n - 1)?
    } else {
        0
    };
    Some(part1 + s * (bits as u128 + (1u128 << (nn - 1)) * sub_index))
}

/// Rows pairwise satisfy `⟨r_{2i}, r_{2i+1}⟩ = 1` and all other pairs 0.
pub fn is_symplectic(rows: &[u64], n: usize) -> bool {
    if rows.len() != 2 * n {
        return false;
    }
    let limit = if 2 * n >= 64 {
        u64::MAX
    } else {
        (1u64 << (2 * n)) - 1
    };
    if rows.iter().any(|&r| r & !limit != 0) {
        return false;
    }
    for a in 0..2 * n {
        for b in a + 1..2 * n {
            let expected = b == a + 1 && a % 2 == 0;
            if symplectic_inner(rows[a], rows[b]) != expected {
                return false;
            }
        }
    }
    true
}
