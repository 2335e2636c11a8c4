use serde::{Deserialize, Serialize};

use super::group::{enumerate_dense, ordered_sum, sample_dense};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::gates;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SamplingMode {
    Full,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignMomentReport {
    pub n: usize,
    pub t: usize,
    pub mode: SamplingMode,
    pub max_abs_error: f64,
    /// Largest entrywise standard error of the sample mean (Monte Carlo only).
    pub standard_error: Option<f64>,
}

/// Haar twirl of `m`: `Tr(M)/d · I` for `t = 1`, `αI + β SWAP` for `t = 2`.
pub fn haar_twirl(n: usize, t: usize, m: &CMatrix) -> Result<CMatrix> {
    let d = 1usize << n;
    match t {
        1 => Ok(linalg::identity(d).scale(m.trace().re / d as f64)
            + linalg::identity(d) * linalg::c(0.0, m.trace().im / d as f64)),
        2 => {
            let swap = gates::swap(d);
            let tr = m.trace();
            let trs = (m * &swap).trace();
            let df = d as f64;
            let den = df * df - 1.0;
            let alpha = (tr - trs / df) / den;
            let beta = (trs - tr / df) / den;
            Ok(linalg::identity(d * d) * alpha + swap * beta)
        }
        _ => Err(Error::OutOfRange(format!("moment order {t}"))),
    }
}

fn conjugate_power(n: usize, t: usize, u: &CMatrix, m: &CMatrix) -> CMatrix {
    let total = n * t;
    let mut out = m.clone();
    for copy in 0..t {
        let qubits: Vec<usize> = (copy * n..(copy + 1) * n).collect();
        out = linalg::conjugate_on(&out, total, &qubits, u);
    }
    out
}

/// Compares the Clifford average of `U^{⊗t} M U^{†⊗t}` with the Haar twirl.
pub fn two_design_moment_error(
    n: usize,
    m: &CMatrix,
    mode: SamplingMode,
) -> Result<DesignMomentReport> {
    let d = 1usize << n;
    let t = if m.nrows() == d {
        1
    } else if m.nrows() == d * d {
        2
    } else {
        return Err(Error::Dimension {
            expected: d * d,
            found: m.nrows(),
        });
    };
    let target = haar_twirl(n, t, m)?;
    let dim = m.nrows();
    match mode {
        SamplingMode::Full => {
            let group = enumerate_dense(n)?;
            let sum = ordered_sum(group.len(), CMatrix::zeros(dim, dim), |i| {
                conjugate_power(n, t, &group[i], m)
            });
            let avg = sum.scale(1.0 / group.len() as f64);
            Ok(DesignMomentReport {
                n,
                t,
                mode,
                max_abs_error: linalg::max_abs(&(avg - target)),
                standard_error: None,
            })
        }
        SamplingMode::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::OutOfRange(
                    "Monte Carlo needs at least two samples".into(),
                ));
            }
            let elems = sample_dense(n, samples, seed)?;
            let terms: Vec<CMatrix> = elems
                .iter()
                .map(|(_, u)| conjugate_power(n, t, u, m))
                .collect();
            let s = samples as f64;
            let mean = terms
                .iter()
                .fold(CMatrix::zeros(dim, dim), |a, x| a + x)
                .scale(1.0 / s);
            let mut se: f64 = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    let var: f64 = terms
                        .iter()
                        .map(|x| (x[(i, j)] - mean[(i, j)]).norm_sqr())
                        .sum::<f64>()
                        / (s - 1.0);
                    se = se.max((var / s).sqrt());
                }
            }
            Ok(DesignMomentReport {
                n,
                t,
                mode,
                max_abs_error: linalg::max_abs(&(mean - target)),
                standard_error: Some(se),
            })
        }
    }
}
