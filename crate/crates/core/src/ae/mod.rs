//! Amplitude estimation of a policy's value.
//!
//! The flag-qubit probability `|c₁|²` of `A^φ|0⟩` equals `φ(v_π)`. The Grover
//! operator `Q` built from `A^φ` has eigenphases `±θ` with
//! `sin²(πθ) = |c₁|²`; phase estimation on a `t`-qubit register recovers `θ`
//! and hence the value, within `ε = (ḡ − g)(π/2^{n+1} + π²/2^{2n+2})` with
//! probability at least `1 − δ`.

mod bounds;
mod config;
mod phase;

pub use bounds::{fejer_kernel, lemma1_bound, phase_of_probability, two_eigenphase_distribution};
pub use config::{config_for, decode_value, epsilon_bound, extra_qubits, QpeConfig};
pub use phase::{
    invariant_subspace, marked_outcomes, phase_estimation, phase_estimation_state, q_qpe_operator,
    qpe_estimate, s0_oracle, value_phase_oracle, InvariantSubspace, PowerMethod, QpeEstimate,
    QpeEvaluator, SamplingMode,
};
