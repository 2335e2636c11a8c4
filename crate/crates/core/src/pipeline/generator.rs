//! Circuit descriptions of mixed-state generators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::metrics::{trace_distance, von_neumann};
use crate::qstate::{gates, purify, DensityOperator, PureState, RegisterLayout};

/// One step of a generator circuit, on absolute qubit positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum GenOp {
    H {
        q: usize,
    },
    S {
        q: usize,
    },
    T {
        q: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    /// Dense unitary on the listed qubits.
    Unitary {
        qubits: Vec<usize>,
        matrix: CMatrix,
    },
    /// `|0⟩⟨0| ⊗ if_zero + |1⟩⟨1| ⊗ if_one`, control first.
    Select {
        control: usize,
        qubits: Vec<usize>,
        if_zero: CMatrix,
        if_one: CMatrix,
    },
    /// `Σ_c |c⟩⟨c| ⊗ unitaries[c]`; control values past the list act as identity.
    Multiplexed {
        controls: Vec<usize>,
        qubits: Vec<usize>,
        unitaries: Vec<CMatrix>,
    },
}

/// Runs `ops` on `|0…0⟩` over `layout`; the state on `output` is the
/// generated mixed state and the `traced` registers purify it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub layout: RegisterLayout,
    pub ops: Vec<GenOp>,
    pub output: Vec<String>,
    pub traced: Vec<String>,
}

fn check_unitary(m: &CMatrix, k: usize) -> Result<()> {
    if m.nrows() != 1 << k || m.ncols() != 1 << k {
        return Err(Error::Dimension {
            expected: 1 << k,
            found: m.nrows(),
        });
    }
    let err = linalg::max_abs(&(m.adjoint() * m - linalg::identity(m.nrows())));
    if err > 1e-9 {
        return Err(Error::InvalidState(format!(
            "non-unitary generator step ({err:e})"
        )));
    }
    Ok(())
}

impl GeneratorSpec {
    pub fn new(
        name: impl Into<String>,
        layout: RegisterLayout,
        ops: Vec<GenOp>,
        output: Vec<String>,
        traced: Vec<String>,
    ) -> Result<Self> {
        let n = layout.total_qubits();
        let mut all: Vec<String> = output.clone();
        all.extend(traced.iter().cloned());
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != all.len() || all.len() != layout.registers().len() {
            return Err(Error::Layout(
                "output and traced registers must partition the layout".into(),
            ));
        }
        if output.is_empty() {
            return Err(Error::Layout("generator without output".into()));
        }
        layout.qubits_of(&all)?;
        for op in &ops {
            let (qs, mats): (Vec<usize>, Vec<(&CMatrix, usize)>) = match op {
                GenOp::H { q } | GenOp::S { q } | GenOp::T { q } => (vec![*q], vec![]),
                GenOp::Cnot { control, target } => (vec![*control, *target], vec![]),
                GenOp::Unitary { qubits, matrix } => (qubits.clone(), vec![(matrix, qubits.len())]),
                GenOp::Select {
                    control,
                    qubits,
                    if_zero,
                    if_one,
                } => {
                    let mut q = vec![*control];
                    q.extend(qubits);
                    (q, vec![(if_zero, qubits.len()), (if_one, qubits.len())])
                }
                GenOp::Multiplexed {
                    controls,
                    qubits,
                    unitaries,
                } => {
                    if controls.len() >= usize::BITS as usize
                        || unitaries.len() > 1usize << controls.len()
                    {
                        return Err(Error::OutOfRange(
                            "more multiplexed blocks than control values".into(),
                        ));
                    }
                    let mut q = controls.clone();
                    q.extend(qubits);
                    (q, unitaries.iter().map(|u| (u, qubits.len())).collect())
                }
            };
            let mut s = qs.clone();
            s.sort();
            s.dedup();
            if s.len() != qs.len() || qs.iter().any(|&q| q >= n) {
                return Err(Error::OutOfRange(format!(
                    "generator step on qubits {qs:?} of {n}"
                )));
            }
            for (m, k) in mats {
                check_unitary(m, k)?;
            }
        }
        Ok(Self {
            name: name.into(),
            layout,
            ops,
            output,
            traced,
        })
    }

    /// Generator for an arbitrary normalized state: a dense unitary maps
    /// `|0…0⟩` to its canonical purification on `A ⊗ P`.
    pub fn preparing(name: impl Into<String>, rho: &DensityOperator) -> Result<Self> {
        let psi = purify(rho)?;
        let n_out = rho.n_qubits();
        let n_p = psi.n_qubits() - n_out;
        let layout = RegisterLayout::new([("A", n_out), ("P", n_p)])?;
        let u = linalg::unitary_with_first_column(psi.amplitudes());
        let ops = vec![GenOp::Unitary {
            qubits: (0..n_out + n_p).collect(),
            matrix: u,
        }];
        Self::new(name, layout, ops, vec!["A".into()], vec!["P".into()])
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    pub fn output_qubits(&self) -> usize {
        self.layout
            .qubits_of(&self.output)
            .map(|q| q.len())
            .unwrap_or(0)
    }

    fn apply(&self, amps: &mut [C64]) {
        let n = self.n_qubits();
        for op in &self.ops {
            match op {
                GenOp::H { q } => linalg::apply_to_slice(amps, n, &[*q], &gates::h()),
                GenOp::S { q } => linalg::apply_to_slice(amps, n, &[*q], &gates::s()),
                GenOp::T { q } => linalg::apply_to_slice(amps, n, &[*q], &gates::t()),
                GenOp::Cnot { control, target } => {
                    linalg::apply_to_slice(amps, n, &[*control, *target], &gates::cnot())
                }
                GenOp::Unitary { qubits, matrix } => {
                    linalg::apply_to_slice(amps, n, qubits, matrix)
                }
                GenOp::Select {
                    control,
                    qubits,
                    if_zero,
                    if_one,
                } => {
                    let k = qubits.len();
                    let d = 1usize << k;
                    let mut u = CMatrix::zeros(2 * d, 2 * d);
                    u.view_mut((0, 0), (d, d)).copy_from(if_zero);
                    u.view_mut((d, d), (d, d)).copy_from(if_one);
                    let mut all = vec![*control];
                    all.extend(qubits);
                    linalg::apply_to_slice(amps, n, &all, &u);
                }
                GenOp::Multiplexed {
                    controls,
                    qubits,
                    unitaries,
                } => {
                    let rest = linalg::complement(controls, n);
                    let rest_off = linalg::offsets(&rest, n);
                    let local: Vec<usize> = qubits
                        .iter()
                        .map(|q| rest.iter().position(|r| r == q).expect("disjoint"))
                        .collect();
                    let mut sub = vec![C64::from(0.0); rest_off.len()];
                    for (c, u) in unitaries.iter().enumerate() {
                        let base = linalg::deposit(c, controls, n);
                        for (s, &o) in sub.iter_mut().zip(&rest_off) {
                            *s = amps[base + o];
                        }
                        linalg::apply_to_slice(&mut sub, rest.len(), &local, u);
                        for (s, &o) in sub.iter().zip(&rest_off) {
                            amps[base + o] = *s;
                        }
                    }
                }
            }
        }
    }

    /// The pure state on the whole layout.
    pub fn purification(&self) -> Result<PureState> {
        let d = self.layout.dim();
        let mut amps = vec![C64::from(0.0); d];
        amps[0] = C64::from(1.0);
        self.apply(&mut amps);
        PureState::new(self.layout.clone(), CVector::from_vec(amps))
    }

    /// Dense unitary of the whole circuit.
    pub fn unitary(&self) -> CMatrix {
        let d = self.layout.dim();
        let mut u = CMatrix::zeros(d, d);
        for col in 0..d {
            let mut amps = vec![C64::from(0.0); d];
            amps[col] = C64::from(1.0);
            self.apply(&mut amps);
            u.set_column(col, &CVector::from_vec(amps));
        }
        u
    }

    /// The generated state on the output registers, in the order listed.
    pub fn state(&self) -> Result<DensityOperator> {
        let psi = self.purification()?;
        let keep = self.layout.qubits_of(&self.output)?;
        let m = linalg::reduced_from_vector(psi.amplitudes().as_slice(), self.n_qubits(), &keep);
        DensityOperator::new(
            self.layout.restrict(&self.output)?.reorder(&self.output)?,
            m,
        )
    }

    /// The same circuit with output registers first (in output order), then
    /// traced registers; qubit indices are remapped.
    pub fn output_first(&self) -> Result<Self> {
        let mut order: Vec<String> = self.output.clone();
        order.extend(self.traced.iter().cloned());
        let new_layout = self.layout.reorder(&order)?;
        let old_positions = self.layout.qubits_of(&order)?;
        let mut map = vec![0usize; self.n_qubits()];
        for (new, &old) in old_positions.iter().enumerate() {
            map[old] = new;
        }
        let ops = self
            .ops
            .iter()
            .map(|op| match op {
                GenOp::H { q } => GenOp::H { q: map[*q] },
                GenOp::S { q } => GenOp::S { q: map[*q] },
                GenOp::T { q } => GenOp::T { q: map[*q] },
                GenOp::Cnot { control, target } => GenOp::Cnot {
                    control: map[*control],
                    target: map[*target],
                },
                GenOp::Unitary { qubits, matrix } => GenOp::Unitary {
                    qubits: qubits.iter().map(|q| map[*q]).collect(),
                    matrix: matrix.clone(),
                },
                GenOp::Select {
                    control,
                    qubits,
                    if_zero,
                    if_one,
                } => GenOp::Select {
                    control: map[*control],
                    qubits: qubits.iter().map(|q| map[*q]).collect(),
                    if_zero: if_zero.clone(),
                    if_one: if_one.clone(),
                },
                GenOp::Multiplexed {
                    controls,
                    qubits,
                    unitaries,
                } => GenOp::Multiplexed {
                    controls: controls.iter().map(|q| map[*q]).collect(),
                    qubits: qubits.iter().map(|q| map[*q]).collect(),
                    unitaries: unitaries.clone(),
                },
            })
            .collect();
        Self::new(
            self.name.clone(),
            new_layout,
            ops,
            self.output.clone(),
            self.traced.clone(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairMeasurements {
    pub distance: f64,
    pub s0: f64,
    pub s1: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EfiPairSpec {
    pub label: String,
    pub gen0: GeneratorSpec,
    pub gen1: GeneratorSpec,
    pub measured: PairMeasurements,
}

impl EfiPairSpec {
    pub fn new(label: impl Into<String>, gen0: GeneratorSpec, gen1: GeneratorSpec) -> Result<Self> {
        let rho0 = gen0.state()?;
        let rho1 = gen1.state()?;
        if rho0.layout() != rho1.layout() {
            return Err(Error::Layout(
                "pair generators disagree on output layout".into(),
            ));
        }
        let measured = PairMeasurements {
            distance: trace_distance(&rho0, &rho1)?,
            s0: von_neumann(&rho0),
            s1: von_neumann(&rho1),
        };
        Ok(Self {
            label: label.into(),
            gen0,
            gen1,
            measured,
        })
    }

    /// Pair preparing two given states.
    pub fn from_states(
        label: impl Into<String>,
        rho0: &DensityOperator,
        rho1: &DensityOperator,
    ) -> Result<Self> {
        Self::new(
            label,
            GeneratorSpec::preparing("rho0", rho0)?,
            GeneratorSpec::preparing("rho1", rho1)?,
        )
    }

    pub fn states(&self) -> Result<(DensityOperator, DensityOperator)> {
        Ok((self.gen0.state()?, self.gen1.state()?))
    }

    /// Recomputes the cached measurements; returns the largest deviation.
    pub fn recheck(&self) -> Result<f64> {
        let again = Self::new(self.label.clone(), self.gen0.clone(), self.gen1.clone())?.measured;
        Ok([
            (again.distance - self.measured.distance).abs(),
            (again.s0 - self.measured.s0).abs(),
            (again.s1 - self.measured.s1).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max))
    }
}
