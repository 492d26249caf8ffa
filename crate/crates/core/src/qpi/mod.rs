//! Quantum policy improvement and quantum policy iteration.
//!
//! A superposition over a policy set is combined with each policy's phase
//! estimation circuit; a threshold oracle on the decoded value marks every
//! `(π, x)` pair beating the current estimate, and Grover search amplifies
//! them. Policy iteration repeats this with an exponentially growing random
//! rotation count until a patience budget runs out.
//!
//! Measuring after amplification only depends on the good-state probability
//! and the unamplified distribution within each class, so the default backend
//! samples from the per-policy outcome distributions directly.
//! [`statevector_qpi_backend`] builds the literal circuit for small instances.

mod iteration;
mod search;
mod statevector;

pub use iteration::{
    exponential_qpi_step, policy_iteration_on, GroverSearchConfig, IterationRecord, QpiRun,
    QpiStep, RunStatus,
};
pub use search::{
    amplified_success, build_search_distribution, grover_amplified_sample, PolicySet,
    SearchDistribution,
};
pub use statevector::{statevector_qpi_backend, StatevectorQpi};

use rand::Rng;

use crate::ae::QpeConfig;
use crate::error::Result;
use crate::qmdp::Mdp;

/// Quantum policy iteration from policy index `start`.
pub fn quantum_policy_iteration<R: Rng + ?Sized>(
    mdp: &Mdp,
    policies: &PolicySet,
    start: usize,
    qpe: &QpeConfig,
    search: &GroverSearchConfig,
    rng: &mut R,
) -> Result<QpiRun> {
    let dist = build_search_distribution(mdp, policies, qpe)?;
    policy_iteration_on(&dist, start, search, rng)
}
