use std::f64::consts::PI;

use super::circuit::Circuit;
use super::gate::{hadamard, phase, swap, Gate};
use super::layout::RegisterLayout;
use crate::error::Result;

/// Quantum Fourier transform on `register`:
/// `|x⟩ ↦ 2^{-m/2} Σ_y e^{2πi·xy/2^m} |y⟩` with `x`, `y` read big-endian.
pub fn qft(layout: &RegisterLayout, register: &str) -> Result<Circuit> {
    let qubits: Vec<usize> = layout.qubits(register)?.collect();
    qft_on(&qubits)
}

pub fn inverse_qft(layout: &RegisterLayout, register: &str) -> Result<Circuit> {
    Ok(qft(layout, register)?.inverse())
}

/// QFT on an explicit qubit list (first qubit most significant).
pub fn qft_on(qubits: &[usize]) -> Result<Circuit> {
    let m = qubits.len();
    let mut c = Circuit::new();
    for i in 0..m {
        c.push(Gate::single(hadamard(), qubits[i])?);
        for j in i + 1..m {
            let angle = 2.0 * PI / (1u64 << (j - i + 1)) as f64;
            c.push(Gate::controlled(
                phase(angle)?,
                vec![qubits[i]],
                vec![qubits[j]],
            )?);
        }
    }
    for i in 0..m / 2 {
        c.push(Gate::dense(swap(), vec![qubits[i], qubits[m - 1 - i]])?);
    }
    Ok(c)
}
