use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};

/// What a register is used for. Purely descriptive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegisterRole {
    State,
    Action,
    Reward,
    Return,
    Ancilla,
    Phase,
    Policy,
    Subspace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Register {
    pub name: String,
    pub size: usize,
    pub role: RegisterRole,
    offset: usize,
}

impl Register {
    /// Global index of the register's most significant qubit.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn qubits(&self) -> Range<usize> {
        self.offset..self.offset + self.size
    }
}

/// Ordered set of named registers over a global qubit index space.
///
/// Qubit 0 is the most significant bit of a basis-state index, and within a
/// register the first qubit is the most significant bit of the register value.
/// Registers of size zero are allowed and simply occupy no qubits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    num_qubits: usize,
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a register after the existing ones.
    pub fn push(&mut self, name: impl Into<String>, size: usize, role: RegisterRole) -> Result<()> {
        let name = name.into();
        if self.registers.iter().any(|r| r.name == name) {
            return Err(Error::DuplicateRegister(name));
        }
        self.registers.push(Register {
            name,
            size,
            role,
            offset: self.num_qubits,
        });
        self.num_qubits += size;
        Ok(())
    }

    pub fn with(
        mut self,
        name: impl Into<String>,
        size: usize,
        role: RegisterRole,
    ) -> Result<Self> {
        self.push(name, size, role)?;
        Ok(self)
    }

    /// Layout with `self`'s registers followed by `other`'s, whose qubit
    /// indices are shifted by `self.num_qubits()`.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        let mut out = self.clone();
        for r in &other.registers {
            out.push(r.name.clone(), r.size, r.role)?;
        }
        Ok(out)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn qubits(&self, name: &str) -> Result<Range<usize>> {
        self.register(name).map(Register::qubits)
    }

    /// Global qubit indices of several registers, in the given order.
    pub fn qubits_of(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for name in names {
            out.extend(self.qubits(name)?);
        }
        Ok(out)
    }

    pub fn all_qubits(&self) -> Vec<usize> {
        (0..self.num_qubits).collect()
    }
}
