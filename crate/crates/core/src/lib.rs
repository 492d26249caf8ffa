//! Quantum policy evaluation and quantum policy iteration for finite Markov
//! decision processes, simulated exactly on a dense state vector.
//!
//! The crate is organised bottom-up:
//!
//! * [`statevec`]: registers, gates, circuits, QFT, measurement statistics.
//! * [`qmdp`]: MDPs and policies as unitaries: policy, environment, step,
//!   trajectory, return and value-encoding operators.
//! * [`ae`]: amplitude estimation of a policy's value via phase estimation.
//! * [`qpi`]: Grover search over a policy set and the policy-iteration loop.
//! * [`baselines`]: classical Monte-Carlo evaluation for comparison.
//! * [`experiments`]: the reproducible experiment drivers behind the CLI.
//! * [`stats`]: medians, quantiles and least-squares fits.

pub mod ae;
pub mod baselines;
pub mod distribution;
pub mod error;
pub mod experiments;
pub mod qmdp;
pub mod qpi;
pub mod seed;
pub mod statevec;
pub mod stats;

mod par;

pub use distribution::OutcomeDistribution;
pub use error::{Error, Result};
