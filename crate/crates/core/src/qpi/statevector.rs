use num_complex::Complex64;

use super::search::PolicySet;
use crate::ae::{q_qpe_operator, s0_oracle, value_phase_oracle, QpeConfig};
use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::qmdp::{a_qpe, Mdp, ReturnEncoding};
use crate::statevec::{
    complete_to_unitary, hadamard, qft_on, Circuit, Control, Gate, RegisterLayout, RegisterRole,
    StateVector,
};

const POLICY: &str = "pol";
const PHASE: &str = "phase";

/// Literal circuit for `A_QPI = (∏_π QPE_π) ∘ (H_P ⊗ id)` on
/// `policy ⊗ phase ⊗ system`, where `QPE_π` is phase estimation of `Q_π`
/// controlled on the policy register holding `π`.
///
/// Exponentially expensive; meant for checking the structured backend on
/// small instances.
#[derive(Clone, Debug)]
pub struct StatevectorQpi {
    pub layout: RegisterLayout,
    pub a_qpi: Circuit,
    pub config: QpeConfig,
}

pub fn statevector_qpi_backend(
    mdp: &Mdp,
    policies: &PolicySet,
    config: &QpeConfig,
) -> Result<StatevectorQpi> {
    let encoding = ReturnEncoding::auto(mdp)?.with_bounds(config.lower, config.upper)?;
    let pol_bits = policies.register_bits();
    let t = config.t;
    let preps = policies
        .policies()
        .iter()
        .map(|p| a_qpe(mdp, p, &encoding))
        .collect::<Result<Vec<_>>>()?;
    let system = &preps[0].layout;
    let layout = RegisterLayout::new()
        .with(POLICY, pol_bits, RegisterRole::Policy)?
        .with(PHASE, t, RegisterRole::Phase)?
        .concat(system)?;
    let budget = crate::statevec::DEFAULT_QUBIT_BUDGET;
    if layout.num_qubits() > budget {
        return Err(Error::QubitBudget {
            requested: layout.num_qubits(),
            budget,
        });
    }
    let pol_qubits: Vec<usize> = layout.qubits(POLICY)?.collect();
    let phase_qubits: Vec<usize> = layout.qubits(PHASE)?.collect();
    let offset = pol_bits + t;

    let mut a_qpi = Circuit::new();
    a_qpi.push(uniform_preparation(policies.len(), &pol_qubits)?);
    for (pi, prep) in preps.iter().enumerate() {
        let select: Vec<Control> = pol_qubits
            .iter()
            .enumerate()
            .map(|(b, &q)| {
                if pi >> (pol_bits - 1 - b) & 1 == 1 {
                    Control::on(q)
                } else {
                    Control::off(q)
                }
            })
            .collect();
        let mut qpe = prep.circuit.shifted(offset);
        for &q in &phase_qubits {
            qpe.push(Gate::single(hadamard(), q)?);
        }
        let q_op = q_qpe_operator(prep)?.shifted(offset);
        for (i, &q) in phase_qubits.iter().enumerate() {
            let controlled = q_op.controlled(&[Control::on(q)])?;
            for _ in 0..1u64 << (t - 1 - i) {
                qpe.append(&controlled);
            }
        }
        qpe.append(&qft_on(&phase_qubits)?.inverse());
        a_qpi.append(&qpe.controlled(&select)?);
    }
    Ok(StatevectorQpi {
        layout,
        a_qpi,
        config: *config,
    })
}

// Maps |0⟩ to the uniform superposition over the first `count` basis states.
fn uniform_preparation(count: usize, qubits: &[usize]) -> Result<Gate> {
    if qubits.is_empty() {
        return Gate::global_phase(Complex64::new(1.0, 0.0));
    }
    let dim = 1usize << qubits.len();
    if count == dim {
        let h_all = (1..qubits.len()).fold(hadamard(), |acc, _| acc.kron(&hadamard()));
        return Gate::dense(h_all, qubits.to_vec());
    }
    let amp = Complex64::new(1.0 / (count as f64).sqrt(), 0.0);
    let column: Vec<Complex64> = (0..dim)
        .map(|i| {
            if i < count {
                amp
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Gate::dense(complete_to_unitary(&[column], dim)?, qubits.to_vec())
}

impl StatevectorQpi {
    pub fn prepare(&self) -> Result<StateVector> {
        let mut state = StateVector::zero(self.layout.clone())?;
        self.a_qpi.apply(&mut state)?;
        Ok(state)
    }

    /// `Q_QPI = −A_QPI S_0 A_QPI† (id ⊗ O_{>threshold})`.
    pub fn grover_operator(&self, threshold: f64) -> Result<Circuit> {
        let phase: Vec<usize> = self.layout.qubits(PHASE)?.collect();
        let mut q = Circuit::new();
        q.push(value_phase_oracle(threshold, &self.config, &phase)?);
        q.append(&self.a_qpi.inverse());
        q.push(s0_oracle(&self.layout.all_qubits())?);
        q.append(&self.a_qpi);
        q.negate();
        Ok(q)
    }

    /// Measurement distribution of `policy ⊗ phase` after `rotations`
    /// applications of the Grover operator.
    pub fn amplified(&self, threshold: f64, rotations: u64) -> Result<OutcomeDistribution> {
        let mut state = self.prepare()?;
        if rotations > 0 {
            let q = self.grover_operator(threshold)?;
            for _ in 0..rotations {
                q.apply(&mut state)?;
            }
        }
        state.measure_probabilities(&[POLICY, PHASE])
    }

    pub fn joint(&self) -> Result<OutcomeDistribution> {
        self.amplified(f64::INFINITY, 0)
    }
}
