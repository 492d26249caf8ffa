use num_complex::Complex64;

use super::gate::{Control, Gate};
use super::layout::{RegisterLayout, RegisterRole};
use super::matrix::CMatrix;
use super::state::StateVector;
use crate::error::Result;

/// An ordered gate sequence; the first gate is applied first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_gates(gates: Vec<Gate>) -> Self {
        Self { gates }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn append(&mut self, other: &Circuit) {
        self.gates.extend_from_slice(&other.gates);
    }

    pub fn then(mut self, other: &Circuit) -> Self {
        self.append(other);
        self
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The adjoint circuit.
    pub fn inverse(&self) -> Self {
        Self {
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Every gate gains the given controls.
    pub fn controlled(&self, controls: &[Control]) -> Result<Self> {
        Ok(Self {
            gates: self
                .gates
                .iter()
                .map(|g| g.with_controls(controls))
                .collect::<Result<_>>()?,
        })
    }

    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            gates: self.gates.iter().map(|g| g.shifted(offset)).collect(),
        }
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        state.apply_all(&self.gates)
    }

    /// Dense matrix of the circuit on `num_qubits` qubits, built column by column.
    pub fn to_matrix(&self, num_qubits: usize) -> Result<CMatrix> {
        let mut layout = RegisterLayout::new();
        layout.push("q", num_qubits, RegisterRole::Ancilla)?;
        let dim = 1usize << num_qubits;
        let mut columns = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut s = StateVector::basis(layout.clone(), j)?;
            self.apply(&mut s)?;
            columns.push(s.into_amplitudes());
        }
        CMatrix::from_columns(&columns)
    }

    /// Appends a `−1` global phase.
    pub fn negate(&mut self) {
        self.push(Gate::global_phase(Complex64::new(-1.0, 0.0)).expect("unit phase"));
    }
}

impl FromIterator<Gate> for Circuit {
    fn from_iter<I: IntoIterator<Item = Gate>>(iter: I) -> Self {
        Self {
            gates: iter.into_iter().collect(),
        }
    }
}
