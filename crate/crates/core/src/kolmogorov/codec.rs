//! Prefix-free circuit codec standing in for a universal machine.
//!
//! A code is an Elias-gamma qubit count `n` followed by 3-bit opcodes
//! `H=000 S=001 T=010 CNOT=011 STOP=100`; single-qubit gates carry one
//! `⌈log₂ n⌉`-bit index, CNOT two (control, target). Decoding reads left to
//! right and stops at STOP, so no decodable code is a proper prefix of
//! another.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qstate::{gates, max_qubits, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    T(usize),
    Cnot(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Program {
    pub n: usize,
    pub gates: Vec<Gate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProgramCode {
    bits: Vec<bool>,
}

impl ProgramCode {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Config(format!("bad code digit `{other}`"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(Self::new)
    }
}

impl fmt::Display for ProgramCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for ProgramCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ProgramCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ProgramCode::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum DecodeFailure {
    Truncated { at: usize },
    BadOpcode { at: usize, opcode: u8 },
    BadQubit { at: usize },
    TooManyQubits { n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DecodeOutcome {
    Program { program: Program, consumed: usize },
    Failure(DecodeFailure),
}

pub const OP_H: u8 = 0b000;
pub const OP_S: u8 = 0b001;
pub const OP_T: u8 = 0b010;
pub const OP_CNOT: u8 = 0b011;
pub const OP_STOP: u8 = 0b100;

/// Bits per qubit index for an `n`-qubit program.
pub fn index_width(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

fn push_bits(out: &mut Vec<bool>, value: usize, width: usize) {
    for k in (0..width).rev() {
        out.push((value >> k) & 1 == 1);
    }
}

pub fn elias_gamma(n: usize) -> Vec<bool> {
    assert!(n >= 1);
    let width = (usize::BITS - n.leading_zeros()) as usize;
    let mut out = vec![false; width - 1];
    push_bits(&mut out, n, width);
    out
}

pub fn encode(program: &Program) -> Result<ProgramCode> {
    let n = program.n;
    if n == 0 {
        return Err(Error::OutOfRange("programs need at least one qubit".into()));
    }
    let w = index_width(n);
    let mut bits = elias_gamma(n);
    for g in &program.gates {
        let (op, qubits): (u8, Vec<usize>) = match *g {
            Gate::H(q) => (OP_H, vec![q]),
            Gate::S(q) => (OP_S, vec![q]),
            Gate::T(q) => (OP_T, vec![q]),
            Gate::Cnot(c, t) => {
                if c == t {
                    return Err(Error::OutOfRange("CNOT needs distinct qubits".into()));
                }
                (OP_CNOT, vec![c, t])
            }
        };
        if qubits.iter().any(|&q| q >= n) {
            return Err(Error::OutOfRange(format!("gate qubit outside 0..{n}")));
        }
        push_bits(&mut bits, op as usize, 3);
        for q in qubits {
            push_bits(&mut bits, q, w);
        }
    }
    push_bits(&mut bits, OP_STOP as usize, 3);
    Ok(ProgramCode::new(bits))
}

/// The shortest code for `n` qubits: the empty circuit producing `|0^n⟩`.
pub fn canonical_empty_code(n: usize) -> ProgramCode {
    encode(&Program {
        n,
        gates: Vec::new(),
    })
    .expect("n ≥ 1")
}

struct Reader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl Reader<'_> {
    fn read(&mut self, width: usize) -> std::result::Result<usize, DecodeFailure> {
        if self.pos + width > self.bits.len() {
            return Err(DecodeFailure::Truncated {
                at: self.bits.len(),
            });
        }
        let mut v = 0usize;
        for k in 0..width {
            v = (v << 1) | self.bits[self.pos + k] as usize;
        }
        self.pos += width;
        Ok(v)
    }
}

/// Decodes a leading code from `bits`; trailing bits are ignored and the
/// consumed length is reported.
pub fn decode_program(bits: &[bool]) -> DecodeOutcome {
    match decode_inner(bits) {
        Ok((program, consumed)) => DecodeOutcome::Program { program, consumed },
        Err(f) => DecodeOutcome::Failure(f),
    }
}

fn decode_inner(bits: &[bool]) -> std::result::Result<(Program, usize), DecodeFailure> {
    let zeros = bits.iter().take_while(|&&b| !b).count();
    if zeros >= bits.len() {
        return Err(DecodeFailure::Truncated { at: bits.len() });
    }
    if zeros >= usize::BITS as usize - 1 {
        return Err(DecodeFailure::TooManyQubits { n: usize::MAX });
    }
    let mut r = Reader { bits, pos: zeros };
    let n = r.read(zeros + 1)?;
    if n > max_qubits() {
        return Err(DecodeFailure::TooManyQubits { n });
    }
    let w = index_width(n);
    let mut gates = Vec::new();
    loop {
        let at = r.pos;
        let op = r.read(3)? as u8;
        let qubit = |r: &mut Reader| -> std::result::Result<usize, DecodeFailure> {
            let q = r.read(w)?;
            if q >= n {
                return Err(DecodeFailure::BadQubit { at });
            }
            Ok(q)
        };
        let gate = match op {
            OP_H => Gate::H(qubit(&mut r)?),
            OP_S => Gate::S(qubit(&mut r)?),
            OP_T => Gate::T(qubit(&mut r)?),
            OP_CNOT => {
                let c = qubit(&mut r)?;
                let t = qubit(&mut r)?;
                if c == t {
                    return Err(DecodeFailure::BadQubit { at });
                }
                Gate::Cnot(c, t)
            }
            OP_STOP => return Ok((Program { n, gates }, r.pos)),
            other => return Err(DecodeFailure::BadOpcode { at, opcode: other }),
        };
        gates.push(gate);
    }
}

impl Program {
    /// Output state `C|0^n⟩` on a register named `A`.
    pub fn run(&self) -> Result<PureState> {
        let mut psi = PureState::zero("A", self.n)?;
        for g in &self.gates {
            psi = match *g {
                Gate::H(q) => psi.apply_on_qubits(&gates::h(), &[q])?,
                Gate::S(q) => psi.apply_on_qubits(&gates::s(), &[q])?,
                Gate::T(q) => psi.apply_on_qubits(&gates::t(), &[q])?,
                Gate::Cnot(c, t) => psi.apply_on_qubits(&gates::cnot(), &[c, t])?,
            };
        }
        Ok(psi)
    }
}

/// Largest supported enumeration length.
pub const MAX_L_MAX: usize = 26;
/// Largest number of enumerated programs.
pub const MAX_PROGRAMS: usize = 2_000_000;

/// All decodable `n`-qubit codes of length at most `l_max`, sorted by
/// length then bit pattern. Walks the code grammar instead of all
/// `2^{l_max+1}` strings.
pub fn enumerate_programs(n: usize, l_max: usize) -> Result<Vec<(ProgramCode, Program)>> {
    if l_max > MAX_L_MAX {
        return Err(Error::OutOfRange(format!(
            "enumeration length {l_max} exceeds {MAX_L_MAX}"
        )));
    }
    if n == 0 || n > max_qubits() {
        return Err(Error::OutOfRange(format!("program width {n}")));
    }
    let w = index_width(n);
    let header = elias_gamma(n).len();
    let mut out = Vec::new();
    let mut stack: Vec<Gate> = Vec::new();
    fn walk(
        n: usize,
        w: usize,
        budget: usize,
        stack: &mut Vec<Gate>,
        out: &mut Vec<(ProgramCode, Program)>,
    ) -> Result<()> {
        if budget < 3 {
            return Ok(());
        }
        let program = Program {
            n,
            gates: stack.clone(),
        };
        out.push((encode(&program)?, program));
        if out.len() > MAX_PROGRAMS {
            return Err(Error::OutOfRange(format!(
                "more than {MAX_PROGRAMS} programs"
            )));
        }
        let single = 3 + w;
        if budget >= single + 3 {
            for q in 0..n {
                for g in [Gate::H(q), Gate::S(q), Gate::T(q)] {
                    stack.push(g);
                    walk(n, w, budget - single, stack, out)?;
                    stack.pop();
                }
            }
        }
        let double = 3 + 2 * w;
        if n >= 2 && budget >= double + 3 {
            for c in 0..n {
                for t in 0..n {
                    if c != t {
                        stack.push(Gate::Cnot(c, t));
                        walk(n, w, budget - double, stack, out)?;
                        stack.pop();
                    }
                }
            }
        }
        Ok(())
    }
    if l_max >= header {
        walk(n, w, l_max - header, &mut stack, &mut out)?;
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}
