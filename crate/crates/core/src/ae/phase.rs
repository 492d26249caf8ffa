use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::Serialize;

use super::config::{decode_value, QpeConfig};
use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::qmdp::{a_qpe, bits_for, Mdp, Policy, ReturnEncoding, StatePreparation};
use crate::statevec::{
    hadamard, inner, inverse_qft, norm, pauli_z, CMatrix, Circuit, Control, Gate, GateOp,
    RegisterLayout, RegisterRole, StateVector,
};

const PHASE: &str = "phase";
const SUBSPACE: &str = "sub";
const MAX_SUBSPACE_DIM: usize = 16;

/// Reflection `S_0`: flips the sign of the all-zeros state of `qubits`.
pub fn s0_oracle(qubits: &[usize]) -> Result<Gate> {
    Gate::zero_reflection(qubits.to_vec())
}

/// Phase-register outcomes whose decoded value is strictly above `threshold`.
pub fn marked_outcomes(threshold: f64, config: &QpeConfig) -> Vec<bool> {
    (0..config.phase_states())
        .map(|x| decode_value(x, config).expect("in range") > threshold)
        .collect()
}

/// `|x⟩ ↦ −|x⟩` when the decoded value of `x` exceeds `threshold`, else identity.
pub fn value_phase_oracle(
    threshold: f64,
    config: &QpeConfig,
    phase_qubits: &[usize],
) -> Result<Gate> {
    if phase_qubits.len() != config.t {
        return Err(Error::DimensionMismatch {
            expected: config.t,
            found: phase_qubits.len(),
        });
    }
    let diag = marked_outcomes(threshold, config)
        .into_iter()
        .map(|m| Complex64::new(if m { -1.0 } else { 1.0 }, 0.0))
        .collect();
    Gate::diagonal(diag, phase_qubits.to_vec())
}

/// Grover operator `Q = −A S_0 A† (id ⊗ Z)` on the preparation's layout.
pub fn q_qpe_operator(a: &StatePreparation) -> Result<Circuit> {
    let mut q = Circuit::new();
    q.push(Gate::single(pauli_z(), a.ancilla)?);
    q.append(&a.circuit.inverse());
    q.push(s0_oracle(&a.layout.all_qubits())?);
    q.append(&a.circuit);
    q.negate();
    Ok(q)
}

/// How the controlled powers `Q^{2^k}` are realised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerMethod {
    /// Apply the controlled `Q` circuit `2^k` times on the full register.
    Repeated,
    /// Restrict `Q` to the subspace reachable from `A|0⟩` and apply cached
    /// matrix powers there.
    #[default]
    Cached,
}

/// Orthonormal basis of the smallest `Q`-invariant subspace containing
/// `A|0⟩`, and `Q` expressed in that basis.
#[derive(Clone, Debug)]
pub struct InvariantSubspace {
    pub basis: Vec<Vec<Complex64>>,
    pub restricted: CMatrix,
}

pub fn invariant_subspace(a: &StatePreparation, q: &Circuit) -> Result<InvariantSubspace> {
    let start = a.prepare()?.into_amplitudes();
    let mut basis = vec![start];
    let mut images: Vec<Vec<Complex64>> = Vec::new();
    loop {
        let last = basis.last().expect("non-empty").clone();
        let mut s = StateVector::from_amplitudes(a.layout.clone(), last)?;
        q.apply(&mut s)?;
        let image = s.into_amplitudes();
        let mut w = image.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        images.push(image);
        let residual = norm(&w);
        if residual < 1e-10 {
            break;
        }
        if basis.len() == MAX_SUBSPACE_DIM {
            return Err(Error::SubspaceNotInvariant(MAX_SUBSPACE_DIM));
        }
        w.iter_mut().for_each(|x| *x /= residual);
        basis.push(w);
    }
    let d = basis.len();
    let mut restricted = CMatrix::zeros(d);
    for (j, image) in images.iter().enumerate() {
        for (i, b) in basis.iter().enumerate() {
            restricted[(i, j)] = inner(b, image);
        }
    }
    Ok(InvariantSubspace { basis, restricted })
}

/// Final state of the phase-estimation circuit: Hadamards on `t` phase
/// qubits, controlled `Q^{2^{t−1−i}}` from phase qubit `i`, inverse QFT.
///
/// With [`PowerMethod::Cached`] the system register is replaced by
/// coordinates in the invariant subspace of `Q`; the phase-register
/// statistics are identical.
pub fn phase_estimation_state(
    a: &StatePreparation,
    q: &Circuit,
    t: usize,
    method: PowerMethod,
) -> Result<StateVector> {
    if t == 0 {
        return Err(Error::Config(
            "phase register needs at least one qubit".into(),
        ));
    }
    match method {
        PowerMethod::Repeated => {
            let top = RegisterLayout::new().with(PHASE, t, RegisterRole::Phase)?;
            let layout = top.concat(&a.layout)?;
            let mut state = StateVector::zero(layout.clone())?;
            a.circuit.shifted(t).apply(&mut state)?;
            for i in 0..t {
                state.apply(&Gate::single(hadamard(), i)?)?;
            }
            let shifted_q = q.shifted(t);
            for i in 0..t {
                let controlled = shifted_q.controlled(&[Control::on(i)])?;
                for _ in 0..1u64 << (t - 1 - i) {
                    controlled.apply(&mut state)?;
                }
            }
            inverse_qft(&layout, PHASE)?.apply(&mut state)?;
            Ok(state)
        }
        PowerMethod::Cached => {
            let sub = invariant_subspace(a, q)?;
            let d = sub.restricted.dim();
            let sub_qubits = bits_for(d).max(1);
            let dim = 1usize << sub_qubits;
            let mut padded = CMatrix::identity(dim);
            for i in 0..d {
                for j in 0..d {
                    padded[(i, j)] = sub.restricted[(i, j)];
                }
            }
            let layout = RegisterLayout::new()
                .with(PHASE, t, RegisterRole::Phase)?
                .with(SUBSPACE, sub_qubits, RegisterRole::Subspace)?;
            let targets: Vec<usize> = layout.qubits(SUBSPACE)?.collect();
            let mut state = StateVector::zero(layout.clone())?;
            for i in 0..t {
                state.apply(&Gate::single(hadamard(), i)?)?;
            }
            // powers[k] = Q^{2^k}
            let mut power = padded;
            let mut powers = Vec::with_capacity(t);
            for k in 0..t {
                if k > 0 {
                    power = &power * &power;
                }
                powers.push(power.clone());
            }
            for i in 0..t {
                state.apply(&Gate::new(
                    GateOp::Dense(powers[t - 1 - i].clone()),
                    targets.clone(),
                    vec![Control::on(i)],
                )?)?;
            }
            inverse_qft(&layout, PHASE)?.apply(&mut state)?;
            Ok(state)
        }
    }
}

/// Exact distribution of the phase-register outcome `x`.
pub fn phase_estimation(
    a: &StatePreparation,
    q: &Circuit,
    t: usize,
    method: PowerMethod,
) -> Result<OutcomeDistribution> {
    phase_estimation_state(a, q, t, method)?.measure_probabilities(&[PHASE])
}

/// Whether estimates are drawn from the precomputed outcome distribution or
/// by measuring the simulated final state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    #[default]
    Analytic,
    Shot,
}

/// One value estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QpeEstimate {
    pub value: f64,
    pub outcome: usize,
    /// Applications of `A` and `A†` the estimate consumed.
    pub a_applications: u64,
}

/// Phase-estimation based value estimator for one policy; the outcome
/// distribution is computed once and reused for every sample.
#[derive(Clone, Debug)]
pub struct QpeEvaluator {
    config: QpeConfig,
    distribution: OutcomeDistribution,
    sampler: WeightedIndex<f64>,
    good_probability: f64,
    mode: SamplingMode,
    final_state: Option<StateVector>,
}

impl QpeEvaluator {
    /// Evaluator for `policy` on `mdp` with the automatically sized return
    /// register and the value bounds of `config`.
    pub fn new(mdp: &Mdp, policy: &Policy, config: &QpeConfig) -> Result<Self> {
        let encoding = ReturnEncoding::auto(mdp)?.with_bounds(config.lower, config.upper)?;
        Self::with_encoding(mdp, policy, &encoding, config)
    }

    pub fn with_encoding(
        mdp: &Mdp,
        policy: &Policy,
        encoding: &ReturnEncoding,
        config: &QpeConfig,
    ) -> Result<Self> {
        if encoding.lower != config.lower || encoding.upper != config.upper {
            return Err(Error::Config(
                "encoding bounds differ from the estimation bounds".into(),
            ));
        }
        let a = a_qpe(mdp, policy, encoding)?;
        Self::from_preparation(&a, config, PowerMethod::Cached, SamplingMode::Analytic)
    }

    pub fn from_preparation(
        a: &StatePreparation,
        config: &QpeConfig,
        method: PowerMethod,
        mode: SamplingMode,
    ) -> Result<Self> {
        let q = q_qpe_operator(a)?;
        let state = phase_estimation_state(a, &q, config.t, method)?;
        let distribution = state.measure_probabilities(&[PHASE])?;
        let sampler = distribution.sampler();
        Ok(Self {
            config: *config,
            sampler,
            good_probability: a.good_probability()?,
            distribution,
            mode,
            final_state: (mode == SamplingMode::Shot).then_some(state),
        })
    }

    pub fn config(&self) -> &QpeConfig {
        &self.config
    }

    pub fn distribution(&self) -> &OutcomeDistribution {
        &self.distribution
    }

    /// Exact `|c₁|²` of the prepared state.
    pub fn good_probability(&self) -> f64 {
        self.good_probability
    }

    /// `φ⁻¹(|c₁|²)`, the value the estimator targets.
    pub fn encoded_value(&self) -> f64 {
        self.config.lower + (self.config.upper - self.config.lower) * self.good_probability
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> QpeEstimate {
        let outcome = match (&self.mode, &self.final_state) {
            (SamplingMode::Shot, Some(state)) => {
                state
                    .sample_and_collapse(&[PHASE], rng)
                    .expect("phase register exists")
                    .0
            }
            _ => self.sampler.sample(rng),
        };
        QpeEstimate {
            value: decode_value(outcome, &self.config).expect("outcome in range"),
            outcome,
            a_applications: self.config.a_applications(),
        }
    }

    /// Probability that the decoded value lies within `epsilon` of `value`.
    pub fn mass_within(&self, value: f64, epsilon: f64) -> f64 {
        self.distribution.mass_where(|x| {
            (decode_value(x, &self.config).expect("in range") - value).abs() <= epsilon
        })
    }
}

/// One-shot value estimate of `policy`.
pub fn qpe_estimate<R: Rng + ?Sized>(
    mdp: &Mdp,
    policy: &Policy,
    config: &QpeConfig,
    rng: &mut R,
) -> Result<QpeEstimate> {
    Ok(QpeEvaluator::new(mdp, policy, config)?.sample(rng))
}
