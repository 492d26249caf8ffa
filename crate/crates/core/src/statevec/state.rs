use num_complex::Complex64;
use rand::Rng;

use super::gate::{Gate, GateOp};
use super::layout::RegisterLayout;
use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};

/// Largest state a [`StateVector`] will allocate unless told otherwise
/// (2^26 amplitudes, 1 GiB).
pub const DEFAULT_QUBIT_BUDGET: usize = 26;

const NORM_TOL: f64 = 1e-10;

/// Dense amplitude vector over a [`RegisterLayout`].
///
/// Basis index bit `n - 1 - q` holds qubit `q`, so qubit 0 is the most
/// significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    layout: RegisterLayout,
}

impl StateVector {
    /// `|0…0⟩` over `layout`.
    pub fn zero(layout: RegisterLayout) -> Result<Self> {
        Self::zero_with_budget(layout, DEFAULT_QUBIT_BUDGET)
    }

    pub fn zero_with_budget(layout: RegisterLayout, budget: usize) -> Result<Self> {
        Self::basis_with_budget(layout, 0, budget)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        Self::basis_with_budget(layout, index, DEFAULT_QUBIT_BUDGET)
    }

    fn basis_with_budget(layout: RegisterLayout, index: usize, budget: usize) -> Result<Self> {
        let n = layout.num_qubits();
        if n == 0 {
            return Err(Error::EmptyLayout);
        }
        if n > budget {
            return Err(Error::QubitBudget {
                requested: n,
                budget,
            });
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::OutcomeOutOfRange {
                outcome: index,
                bits: n,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, layout })
    }

    /// Wraps explicit amplitudes; they must be normalized.
    pub fn from_amplitudes(layout: RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = layout.num_qubits();
        if n == 0 {
            return Err(Error::EmptyLayout);
        }
        if amplitudes.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                expected: 1usize << n,
                found: amplitudes.len(),
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes, layout })
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    fn bit_mask(&self, qubit: usize) -> usize {
        1usize << (self.num_qubits() - 1 - qubit)
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        let n = self.num_qubits();
        if let Some(q) = gate.max_qubit() {
            if q >= n {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits: n,
                });
            }
        }
        let targets = gate.targets();
        let k = targets.len();
        // offsets[j]: index displacement for target basis value j (first target = MSB of j)
        let offsets: Vec<usize> = (0..1usize << k)
            .map(|j| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| j >> (k - 1 - b) & 1 == 1)
                    .map(|(_, &q)| self.bit_mask(q))
                    .sum()
            })
            .collect();
        let mut positions: Vec<u32> = targets.iter().map(|&q| (n - 1 - q) as u32).collect();
        positions.sort_unstable();
        let (ctrl_mask, ctrl_value) = gate.controls().iter().fold((0, 0), |(m, v), c| {
            let bit = self.bit_mask(c.qubit);
            (m | bit, if c.value { v | bit } else { v })
        });

        let blocks = 1usize << (n - k);
        let amps = &mut self.amplitudes;
        let mut buf = vec![Complex64::new(0.0, 0.0); offsets.len()];
        for i in 0..blocks {
            let mut base = i;
            for &p in &positions {
                let low = base & ((1usize << p) - 1);
                base = ((base >> p) << (p + 1)) | low;
            }
            if base & ctrl_mask != ctrl_value {
                continue;
            }
            match gate.op() {
                GateOp::Dense(m) => {
                    for (b, &off) in buf.iter_mut().zip(&offsets) {
                        *b = amps[base + off];
                    }
                    let dim = offsets.len();
                    let data = m.as_slice();
                    for (r, &off) in offsets.iter().enumerate() {
                        let row = &data[r * dim..(r + 1) * dim];
                        amps[base + off] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
                    }
                }
                GateOp::Diagonal(d) => {
                    for (phase, &off) in d.iter().zip(&offsets) {
                        amps[base + off] *= phase;
                    }
                }
                GateOp::Permutation(p) => {
                    for (b, &off) in buf.iter_mut().zip(&offsets) {
                        *b = amps[base + off];
                    }
                    for (j, &image) in p.iter().enumerate() {
                        amps[base + offsets[image]] = buf[j];
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    /// Exact joint distribution of the named registers (big-endian, in the given order).
    pub fn measure_probabilities(&self, registers: &[&str]) -> Result<OutcomeDistribution> {
        let qubits = self.layout.qubits_of(registers)?;
        let masks: Vec<usize> = qubits.iter().map(|&q| self.bit_mask(q)).collect();
        let mut probs = vec![0.0; 1usize << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            probs[self.extract(i, &masks)] += p;
        }
        OutcomeDistribution::new(qubits.len(), probs)
    }

    fn extract(&self, index: usize, masks: &[usize]) -> usize {
        masks
            .iter()
            .fold(0, |acc, &m| (acc << 1) | usize::from(index & m != 0))
    }

    /// Samples the named registers and returns the outcome with the
    /// renormalized post-measurement state.
    pub fn sample_and_collapse<R: Rng + ?Sized>(
        &self,
        registers: &[&str],
        rng: &mut R,
    ) -> Result<(usize, StateVector)> {
        let dist = self.measure_probabilities(registers)?;
        let outcome = dist.sample(rng);
        let qubits = self.layout.qubits_of(registers)?;
        let masks: Vec<usize> = qubits.iter().map(|&q| self.bit_mask(q)).collect();
        let scale = 1.0 / dist.probability(outcome).sqrt();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if self.extract(i, &masks) == outcome {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok((
            outcome,
            StateVector {
                amplitudes,
                layout: self.layout.clone(),
            },
        ))
    }
}
