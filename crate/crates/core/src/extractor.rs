//! Clifford-based quantum strong extractor: conjugate A by a uniformly chosen
//! Clifford, keep the first `ℓ` qubits, publish the Clifford index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{enumerate_dense, group::ordered_sum, sample_dense, SamplingMode};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::metrics::{self, distance::trace_distance_matrices};
use crate::qstate::{DensityOperator, RegisterLayout};

/// Largest A width for full enumeration.
pub const MAX_FULL_QUBITS: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractorParams {
    pub n: usize,
    pub ell: usize,
    pub k_min: f64,
    pub eps: f64,
    pub delta_smooth: f64,
    /// Real-valued output length the guarantee permits.
    pub bound: f64,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExtractorPlan {
    Feasible(ExtractorParams),
    Infeasible {
        n: usize,
        k_min: f64,
        eps: f64,
        bound: f64,
    },
}

impl ExtractorPlan {
    pub fn params(&self) -> Option<&ExtractorParams> {
        match self {
            ExtractorPlan::Feasible(p) => Some(p),
            ExtractorPlan::Infeasible { .. } => None,
        }
    }
}

fn check_inputs(n: usize, k_min: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!(
            "extractor error {eps} outside (0, 1)"
        )));
    }
    if n == 0 || !(k_min >= -(n as f64) - 1e-12 && k_min <= n as f64 + 1e-12) {
        return Err(Error::OutOfRange(format!(
            "k_min {k_min} outside [−{n}, {n}]"
        )));
    }
    Ok((n as f64 + k_min) / 2.0 - (1.0 / eps).log2())
}

/// Largest output length `⌊(n + k)/2 − log₂(1/ε)⌋`, capped at `n`.
pub fn extractor_params(n: usize, k_min: f64, eps: f64) -> Result<ExtractorPlan> {
    let bound = check_inputs(n, k_min, eps)?;
    let ell = (bound + 1e-12).floor();
    if ell < 1.0 {
        return Ok(ExtractorPlan::Infeasible {
            n,
            k_min,
            eps,
            bound,
        });
    }
    let ell = (ell as usize).min(n);
    Ok(ExtractorPlan::Feasible(ExtractorParams {
        n,
        ell,
        k_min,
        eps,
        delta_smooth: eps / 12.0,
        bound,
        feasible: true,
    }))
}

/// Parameters with a caller-chosen `ℓ`; `feasible` records whether the
/// guarantee covers it.
pub fn params_with_ell(n: usize, ell: usize, k_min: f64, eps: f64) -> Result<ExtractorParams> {
    let bound = check_inputs(n, k_min, eps)?;
    if ell == 0 || ell > n {
        return Err(Error::OutOfRange(format!(
            "output length {ell} outside [1, {n}]"
        )));
    }
    Ok(ExtractorParams {
        n,
        ell,
        k_min,
        eps,
        delta_smooth: eps / 12.0,
        bound,
        feasible: ell as f64 <= bound + 1e-12,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractorBranch {
    pub clifford_index: u128,
    /// `Tr_{A2}(U ρ U†)` on `A1 ⊗ E`.
    pub operator: CMatrix,
}

/// Branches of `(1/|L|) Σ_j |j⟩⟨j| ⊗ Tr_{A2}(U_j ρ U_j†)`; the index
/// register is implicit and uniform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractorOutput {
    pub mode: SamplingMode,
    pub n_a: usize,
    pub ell: usize,
    /// Layout of every branch operator, `A1` registers then `E` registers.
    pub layout: RegisterLayout,
    pub branches: Vec<ExtractorBranch>,
    /// `ρ_E`, the reduced input on the untouched registers.
    pub environment: CMatrix,
    input_trace: f64,
}

impl ExtractorOutput {
    pub fn weight(&self) -> f64 {
        1.0 / self.branches.len() as f64
    }

    /// `I/|A1| ⊗ ρ_E`.
    pub fn ideal(&self) -> CMatrix {
        let d1 = 1usize << self.ell;
        linalg::kron(
            &linalg::identity(d1).scale(1.0 / d1 as f64),
            &self.environment,
        )
    }

    /// Branch-averaged operator (the cq state with the index traced out).
    pub fn average(&self) -> DensityOperator {
        let d = self.layout.dim();
        let sum = ordered_sum(self.branches.len(), CMatrix::zeros(d, d), |i| {
            self.branches[i].operator.clone()
        });
        DensityOperator::from_trusted(
            self.layout.clone(),
            sum.scale(self.weight()),
            self.input_trace < 1.0 - 1e-9,
        )
    }

    /// Full cq operator with an explicit index register `L` (small runs only).
    pub fn cq_operator(&self) -> Result<CMatrix> {
        let d = self.layout.dim();
        let total = d * self.branches.len();
        if total > 1usize << crate::qstate::max_qubits() {
            return Err(Error::OutOfRange(format!(
                "cq operator of dimension {total}"
            )));
        }
        let mut out = CMatrix::zeros(total, total);
        for (j, b) in self.branches.iter().enumerate() {
            out.view_mut((j * d, j * d), (d, d))
                .copy_from(&b.operator.scale(self.weight()));
        }
        Ok(out)
    }

    /// Trace distance of each branch to [`ideal`](Self::ideal).
    pub fn branch_distances(&self) -> Vec<f64> {
        let ideal = self.ideal();
        self.branches
            .par_iter()
            .map(|b| trace_distance_matrices(&b.operator, &ideal))
            .collect()
    }

    /// Largest deviation of a branch trace from the input trace.
    pub fn trace_residual(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| (b.operator.trace().re - self.input_trace).abs())
            .fold(0.0, f64::max)
    }
}

/// Reorders `ρ` to `A1, A2, E` and returns it with the A width and A1 width.
fn arrange<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    a1: &[S],
) -> Result<(DensityOperator, usize, usize, RegisterLayout)> {
    let a: Vec<String> = a.iter().map(|s| s.as_ref().to_string()).collect();
    let a1: Vec<String> = a1.iter().map(|s| s.as_ref().to_string()).collect();
    for name in &a1 {
        if !a.contains(name) {
            return Err(Error::Layout(format!(
                "output register `{name}` is not part of A"
            )));
        }
    }
    for name in &a {
        rho.layout().register_qubits(name)?;
    }
    if a1.is_empty() {
        return Err(Error::Layout("extractor output A1 is empty".into()));
    }
    let a2: Vec<String> = a.iter().filter(|n| !a1.contains(n)).cloned().collect();
    let e = rho.layout().others(&a);
    let mut order = a1.clone();
    order.extend(a2);
    order.extend(e.iter().cloned());
    let arranged = rho.reorder(&order)?;
    let n_a = arranged.layout().qubits_of(&a)?.len();
    let ell = arranged.layout().qubits_of(&a1)?.len();
    let mut keep = a1;
    keep.extend(e);
    let branch_layout = arranged.layout().restrict(&keep)?;
    Ok((arranged, n_a, ell, branch_layout))
}

fn branch(m: &CMatrix, n: usize, n_a: usize, ell: usize, u: &CMatrix) -> CMatrix {
    let a: Vec<usize> = (0..n_a).collect();
    let conj = linalg::conjugate_on(m, n, &a, u);
    let keep: Vec<usize> = (0..ell).chain(n_a..n).collect();
    linalg::partial_trace_qubits(&conj, n, &keep)
}

/// Applies the extractor on registers `a`, keeping `a1 ⊆ a`.
pub fn apply_extractor<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    a1: &[S],
    mode: SamplingMode,
) -> Result<ExtractorOutput> {
    let (arranged, n_a, ell, layout) = arrange(rho, a, a1)?;
    let n = arranged.n_qubits();
    let m = arranged.matrix();
    let branches: Vec<ExtractorBranch> = match mode {
        SamplingMode::Full => {
            if n_a > MAX_FULL_QUBITS {
                return Err(Error::OutOfRange(format!(
                    "full enumeration over {n_a} > {MAX_FULL_QUBITS} qubits"
                )));
            }
            let group = enumerate_dense(n_a)?;
            group
                .par_iter()
                .enumerate()
                .map(|(j, u)| ExtractorBranch {
                    clifford_index: j as u128,
                    operator: branch(m, n, n_a, ell, u),
                })
                .collect()
        }
        SamplingMode::MonteCarlo { samples, seed } => {
            if samples < 1 {
                return Err(Error::OutOfRange(
                    "extractor needs at least one sample".into(),
                ));
            }
            sample_dense(n_a, samples, seed)?
                .into_par_iter()
                .map(|(j, u)| ExtractorBranch {
                    clifford_index: j,
                    operator: branch(m, n, n_a, ell, &u),
                })
                .collect()
        }
    };
    let e_qubits: Vec<usize> = (n_a..n).collect();
    let environment = linalg::partial_trace_qubits(m, n, &e_qubits);
    Ok(ExtractorOutput {
        mode,
        n_a,
        ell,
        layout,
        branches,
        environment,
        input_trace: arranged.trace(),
    })
}

/// Applies the extractor to the concatenation of registers `a`, keeping its
/// first `ell` qubits.
pub fn apply_extractor_leading<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    ell: usize,
    mode: SamplingMode,
) -> Result<ExtractorOutput> {
    let (a_regs, e_regs) = split_leading(rho, a, ell)?;
    let relabeled = rho.reorder(
        &a.iter()
            .map(|s| s.as_ref())
            .chain(e_regs.iter().map(String::as_str))
            .collect::<Vec<_>>(),
    )?;
    let n_a = relabeled.layout().qubits_of(a)?.len();
    let mut regs: Vec<(String, usize)> = vec![("A1".into(), ell)];
    if n_a > ell {
        regs.push(("A2".into(), n_a - ell));
    }
    for name in &e_regs {
        regs.push((name.clone(), relabeled.layout().register_qubits(name)?));
    }
    let relabeled = relabeled.relabel(RegisterLayout::new(regs)?)?;
    apply_extractor(&relabeled, &a_regs, &a_regs[..1], mode)
}

fn split_leading<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    ell: usize,
) -> Result<(Vec<String>, Vec<String>)> {
    let n_a = rho.layout().qubits_of(a)?.len();
    if ell == 0 || ell > n_a {
        return Err(Error::OutOfRange(format!(
            "output length {ell} outside [1, {n_a}]"
        )));
    }
    for name in rho.layout().names() {
        if (name == "A1" || name == "A2") && !a.iter().any(|s| s.as_ref() == name) {
            return Err(Error::Layout(format!(
                "register name `{name}` is reserved by the extractor"
            )));
        }
    }
    let mut a_regs = vec!["A1".to_string()];
    if n_a > ell {
        a_regs.push("A2".to_string());
    }
    Ok((a_regs, rho.layout().others(a)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    /// Mean branch distance to `I/|A1| ⊗ ρ_E`.
    pub error: f64,
    /// Standard error of the mean (Monte Carlo only).
    pub standard_error: Option<f64>,
    pub samples: usize,
}

/// Trace distance of the extractor output to `I_L/|L| ⊗ I/|A1| ⊗ ρ_E`,
/// the uniform average of branch distances (block-diagonal structure).
pub fn decoupling_error<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    a1: &[S],
    mode: SamplingMode,
) -> Result<f64> {
    Ok(decoupling_report(&apply_extractor(rho, a, a1, mode)?).error)
}

pub fn decoupling_report(out: &ExtractorOutput) -> DecouplingReport {
    let d = out.branch_distances();
    let s = d.len() as f64;
    let mean = d.iter().sum::<f64>() / s;
    let standard_error = match out.mode {
        SamplingMode::Full => None,
        SamplingMode::MonteCarlo { .. } if d.len() > 1 => {
            let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (s - 1.0);
            Some((var / s).sqrt())
        }
        SamplingMode::MonteCarlo { .. } => Some(f64::INFINITY),
    };
    DecouplingReport {
        error: mean,
        standard_error,
        samples: d.len(),
    }
}

/// Comparison of an assumed `k_min` with a certified lower bound on the
/// smoothed conditional min-entropy `H_min^δ(A|E)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMinCheck {
    pub assumed: f64,
    pub certified: f64,
    pub consistent: bool,
}

pub fn check_k_min<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    k_min: f64,
    delta: f64,
) -> Result<KMinCheck> {
    let e = rho.layout().others(a);
    let certified = if e.is_empty() {
        metrics::smooth_entropy_bound(metrics::SmoothBound::MinLb, rho, delta)?.value
    } else {
        let a: Vec<String> = a.iter().map(|s| s.as_ref().to_string()).collect();
        metrics::conditional_min_entropy(rho, &a, &e, delta)?.value
    };
    Ok(KMinCheck {
        assumed: k_min,
        certified,
        consistent: certified >= k_min - 1e-9,
    })
}

/// One row of the decoupling experiment table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingRow {
    pub n: usize,
    pub ell: usize,
    pub k_min: f64,
    pub eps: f64,
    pub mode: String,
    pub samples: usize,
    pub measured_error: f64,
    pub bound: f64,
    pub pass: bool,
}

impl DecouplingRow {
    pub fn new(params: &ExtractorParams, report: &DecouplingReport, mode: SamplingMode) -> Self {
        let mode = match mode {
            SamplingMode::Full => "full".to_string(),
            SamplingMode::MonteCarlo { .. } => "monte_carlo".to_string(),
        };
        Self {
            n: params.n,
            ell: params.ell,
            k_min: params.k_min,
            eps: params.eps,
            mode,
            samples: report.samples,
            measured_error: report.error,
            bound: params.eps,
            pass: !params.feasible || report.error <= params.eps + 1e-9,
        }
    }
}

pub fn write_decoupling_csv<W: std::io::Write>(rows: &[DecouplingRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}
