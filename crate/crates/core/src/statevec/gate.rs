use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Tolerance used for every unitarity check on gate construction.
pub const UNITARY_TOL: f64 = 1e-10;

/// A control qubit together with the basis value it must hold for the gate to act.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Self { qubit, value: true }
    }

    pub fn off(qubit: usize) -> Self {
        Self {
            qubit,
            value: false,
        }
    }
}

/// The operator a gate applies to its targets.
///
/// Diagonal and permutation forms are kept separate from dense matrices so
/// phase oracles and reversible arithmetic stay cheap to apply.
#[derive(Clone, Debug, PartialEq)]
pub enum GateOp {
    Dense(CMatrix),
    Diagonal(Vec<Complex64>),
    /// `perm[j]` is the image of target basis state `j`.
    Permutation(Vec<usize>),
}

impl GateOp {
    pub fn dim(&self) -> usize {
        match self {
            GateOp::Dense(m) => m.dim(),
            GateOp::Diagonal(d) => d.len(),
            GateOp::Permutation(p) => p.len(),
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        match self {
            GateOp::Dense(m) => m.clone(),
            GateOp::Diagonal(d) => CMatrix::diagonal(d),
            GateOp::Permutation(p) => {
                let mut m = CMatrix::zeros(p.len());
                for (j, &i) in p.iter().enumerate() {
                    m[(i, j)] = Complex64::new(1.0, 0.0);
                }
                m
            }
        }
    }

    fn adjoint(&self) -> Self {
        match self {
            GateOp::Dense(m) => GateOp::Dense(m.adjoint()),
            GateOp::Diagonal(d) => GateOp::Diagonal(d.iter().map(|x| x.conj()).collect()),
            GateOp::Permutation(p) => {
                let mut inv = vec![0; p.len()];
                for (j, &i) in p.iter().enumerate() {
                    inv[i] = j;
                }
                GateOp::Permutation(inv)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GateOp::Dense(m) => {
                let deviation = m.unitarity_deviation();
                if deviation > UNITARY_TOL {
                    return Err(Error::NotUnitary { deviation });
                }
            }
            GateOp::Diagonal(d) => {
                let deviation = d.iter().map(|x| (x.norm() - 1.0).abs()).fold(0.0, f64::max);
                if deviation > UNITARY_TOL {
                    return Err(Error::NotUnitary { deviation });
                }
            }
            GateOp::Permutation(p) => {
                let mut seen = vec![false; p.len()];
                for &i in p {
                    if i >= p.len() || seen[i] {
                        return Err(Error::NotUnitary { deviation: 1.0 });
                    }
                    seen[i] = true;
                }
            }
        }
        Ok(())
    }
}

/// A (possibly controlled) unitary acting on `targets`.
///
/// The first target is the most significant bit of the operator's row and
/// column index. A gate with no targets is a phase applied to the subspace
/// selected by its controls.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    op: GateOp,
    targets: Vec<usize>,
    controls: Vec<Control>,
}

impl Gate {
    pub fn new(op: GateOp, targets: Vec<usize>, controls: Vec<Control>) -> Result<Self> {
        let expected =
            1usize
                .checked_shl(targets.len() as u32)
                .ok_or(Error::DimensionMismatch {
                    expected: usize::MAX,
                    found: op.dim(),
                })?;
        if op.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: op.dim(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for q in targets
            .iter()
            .copied()
            .chain(controls.iter().map(|c| c.qubit))
        {
            if !seen.insert(q) {
                return Err(Error::OverlappingQubits(q));
            }
        }
        op.validate()?;
        Ok(Self {
            op,
            targets,
            controls,
        })
    }

    pub fn dense(matrix: CMatrix, targets: Vec<usize>) -> Result<Self> {
        Self::new(GateOp::Dense(matrix), targets, Vec::new())
    }

    pub fn single(matrix: CMatrix, target: usize) -> Result<Self> {
        Self::dense(matrix, vec![target])
    }

    pub fn controlled(matrix: CMatrix, targets: Vec<usize>, controls: Vec<usize>) -> Result<Self> {
        Self::new(
            GateOp::Dense(matrix),
            targets,
            controls.into_iter().map(Control::on).collect(),
        )
    }

    pub fn diagonal(entries: Vec<Complex64>, targets: Vec<usize>) -> Result<Self> {
        Self::new(GateOp::Diagonal(entries), targets, Vec::new())
    }

    pub fn permutation(perm: Vec<usize>, targets: Vec<usize>) -> Result<Self> {
        Self::new(GateOp::Permutation(perm), targets, Vec::new())
    }

    /// Scalar phase `e^{iφ}` on the whole state (observable only once controlled).
    pub fn global_phase(phase: Complex64) -> Result<Self> {
        Self::new(GateOp::Diagonal(vec![phase]), Vec::new(), Vec::new())
    }

    /// Flips the sign of the all-zeros basis state of `qubits`.
    pub fn zero_reflection(qubits: Vec<usize>) -> Result<Self> {
        let dim = 1usize << qubits.len();
        let mut diag = vec![Complex64::new(1.0, 0.0); dim];
        diag[0] = Complex64::new(-1.0, 0.0);
        Self::diagonal(diag, qubits)
    }

    pub fn op(&self) -> &GateOp {
        &self.op
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    pub fn adjoint(&self) -> Self {
        Self {
            op: self.op.adjoint(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    /// Adds further controls.
    pub fn with_controls(&self, extra: &[Control]) -> Result<Self> {
        let mut controls = self.controls.clone();
        controls.extend_from_slice(extra);
        Self::new(self.op.clone(), self.targets.clone(), controls)
    }

    /// The same gate with every qubit index shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            op: self.op.clone(),
            targets: self.targets.iter().map(|q| q + offset).collect(),
            controls: self
                .controls
                .iter()
                .map(|c| Control {
                    qubit: c.qubit + offset,
                    value: c.value,
                })
                .collect(),
        }
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|c| c.qubit))
            .max()
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `R_y(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`.
pub fn ry(theta: f64) -> Result<CMatrix> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_real_rows(2, &[co, -s, s, co])
}

pub fn hadamard() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    CMatrix::from_real_rows(2, &[s, s, s, -s]).expect("2x2")
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_z() -> CMatrix {
    CMatrix::diagonal(&[c(1.0), c(-1.0)])
}

/// `diag(1, e^{iφ})`.
pub fn phase(phi: f64) -> Result<CMatrix> {
    if !phi.is_finite() {
        return Err(Error::NonFiniteAngle(phi));
    }
    Ok(CMatrix::diagonal(&[
        c(1.0),
        Complex64::from_polar(1.0, phi),
    ]))
}

/// Two-qubit CNOT with the first qubit as control.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::identity(4);
    m[(2, 2)] = c(0.0);
    m[(3, 3)] = c(0.0);
    m[(2, 3)] = c(1.0);
    m[(3, 2)] = c(1.0);
    m
}

/// Three-qubit Toffoli with the first two qubits as controls.
pub fn toffoli() -> CMatrix {
    let mut m = CMatrix::identity(8);
    m[(6, 6)] = c(0.0);
    m[(7, 7)] = c(0.0);
    m[(6, 7)] = c(1.0);
    m[(7, 6)] = c(1.0);
    m
}

pub fn swap() -> CMatrix {
    let mut m = CMatrix::zeros(4);
    m[(0, 0)] = c(1.0);
    m[(1, 2)] = c(1.0);
    m[(2, 1)] = c(1.0);
    m[(3, 3)] = c(1.0);
    m
}
