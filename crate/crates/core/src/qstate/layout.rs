use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the total number of qubits of any dense object.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "EFIKIT_MAX_QUBITS";

/// The configured qubit cap, read once from the environment.
pub fn max_qubits() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_QUBITS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&v: &usize| (1..=20).contains(&v))
            .unwrap_or(DEFAULT_MAX_QUBITS)
    })
}

/// A named group of qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub qubits: usize,
}

/// Ordered list of named registers. The first register holds the most
/// significant qubits of the basis index.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(registers: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let registers: Vec<Register> = registers
            .into_iter()
            .map(|(name, qubits)| Register {
                name: name.into(),
                qubits,
            })
            .collect();
        for (i, r) in registers.iter().enumerate() {
            if r.qubits == 0 {
                return Err(Error::Layout(format!(
                    "register `{}` has no qubits",
                    r.name
                )));
            }
            if registers[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::Layout(format!("duplicate register `{}`", r.name)));
            }
        }
        let total: usize = registers.iter().map(|r| r.qubits).sum();
        if total > max_qubits() {
            return Err(Error::Layout(format!(
                "{total} qubits exceed the cap of {}",
                max_qubits()
            )));
        }
        Ok(Self { registers })
    }

    /// A single register.
    pub fn single(name: &str, qubits: usize) -> Result<Self> {
        Self::new([(name, qubits)])
    }

    /// The empty layout of a scalar (dimension 1).
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn names(&self) -> Vec<&str> {
        self.registers.iter().map(|r| r.name.as_str()).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    pub fn total_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.qubits).sum()
    }

    pub fn dim(&self) -> usize {
        1usize << self.total_qubits()
    }

    pub fn register_qubits(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.qubits)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    /// Absolute qubit positions of one register.
    pub fn qubit_range(&self, name: &str) -> Result<std::ops::Range<usize>> {
        let mut start = 0;
        for r in &self.registers {
            if r.name == name {
                return Ok(start..start + r.qubits);
            }
            start += r.qubits;
        }
        Err(Error::UnknownRegister(name.to_string()))
    }

    /// Absolute qubit positions of several registers, in the given order.
    pub fn qubits_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for n in names {
            out.extend(self.qubit_range(n.as_ref())?);
        }
        Ok(out)
    }

    /// Concatenation; fails on a name collision.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        Self::new(
            self.registers
                .iter()
                .chain(other.registers.iter())
                .map(|r| (r.name.clone(), r.qubits)),
        )
    }

    /// Sub-layout of the named registers, kept in this layout's order.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        for k in keep {
            if !self.contains(k.as_ref()) {
                return Err(Error::UnknownRegister(k.as_ref().to_string()));
            }
        }
        Ok(Self {
            registers: self
                .registers
                .iter()
                .filter(|r| keep.iter().any(|k| k.as_ref() == r.name))
                .cloned()
                .collect(),
        })
    }

    /// Names of the registers not in `names`.
    pub fn others<S: AsRef<str>>(&self, names: &[S]) -> Vec<String> {
        self.registers
            .iter()
            .filter(|r| !names.iter().any(|k| k.as_ref() == r.name))
            .map(|r| r.name.clone())
            .collect()
    }

    /// Layout with the registers reordered as `order` (a permutation of names).
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        if order.len() != self.registers.len() {
            return Err(Error::Layout(
                "reorder must list every register once".into(),
            ));
        }
        let mut regs = Vec::new();
        for name in order {
            let q = self.register_qubits(name.as_ref())?;
            regs.push((name.as_ref().to_string(), q));
        }
        Self::new(regs)
    }

    /// Same registers with every name prefixed.
    pub fn prefixed(&self, prefix: &str) -> Self {
        Self {
            registers: self
                .registers
                .iter()
                .map(|r| Register {
                    name: format!("{prefix}{}", r.name),
                    qubits: r.qubits,
                })
                .collect(),
        }
    }
}

impl std::fmt::Display for RegisterLayout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .registers
            .iter()
            .map(|r| format!("{}[{}]", r.name, r.qubits))
            .collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_follow_order() {
        let l = RegisterLayout::new([("A", 2), ("B", 1)]).unwrap();
        assert_eq!(l.qubit_range("B").unwrap(), 2..3);
        assert_eq!(l.qubits_of(&["B", "A"]).unwrap(), vec![2, 0, 1]);
        assert_eq!(l.dim(), 8);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(RegisterLayout::new([("A", 1), ("A", 1)]).is_err());
        assert!(RegisterLayout::new([("A", 0)]).is_err());
        assert!(RegisterLayout::single("A", max_qubits() + 1).is_err());
    }
}
