//! Finite MDPs and their quantum realisation.
//!
//! A policy `π` and the dynamics `p` become unitaries whose columns on the
//! reference states carry amplitudes `√π(a|s)` and `√p(r,s'|s,a)`. Chaining
//! `H` step operators prepares a superposition over trajectories whose
//! squared amplitudes are the trajectory probabilities; a reversible adder
//! writes each trajectory's discounted return into a register, and a
//! controlled rotation maps the rescaled return onto a flag qubit.

mod encoding;
mod mdp;
mod operators;

pub use encoding::{for_each_reward_string, reward_string_return, ReturnEncoding};
pub use mdp::{
    bits_for, discounted_return, exact_value, exact_value_with_budget, for_each_trajectory, Mdp,
    Policy, Step, TwoArmedBandit, DEFAULT_ENUMERATION_BUDGET,
};
pub use operators::{
    a_qpe, bandit_step_circuit, build_environment_operator, build_policy_operator, mdp_operator,
    phi_operator, reachable_codes, return_operator, step_operator, trajectory_layout,
    trajectory_registers, StatePreparation,
};
