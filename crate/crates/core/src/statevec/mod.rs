//! Dense state-vector simulation: registers, gates, circuits, the QFT and
//! exact measurement statistics.

mod circuit;
mod gate;
mod layout;
mod matrix;
mod qft;
mod state;

pub use circuit::Circuit;
pub use gate::{
    cnot, hadamard, pauli_x, pauli_z, phase, ry, swap, toffoli, Control, Gate, GateOp, UNITARY_TOL,
};
pub use layout::{Register, RegisterLayout, RegisterRole};
pub use matrix::{complete_to_unitary, inner, norm, CMatrix};
pub use qft::{inverse_qft, qft, qft_on};
pub use state::{StateVector, DEFAULT_QUBIT_BUDGET};
