use rand::Rng;
use serde::Serialize;

use super::search::{grover_amplified_sample, SearchDistribution};
use crate::error::{Error, Result};

/// Schedule and stopping parameters of the Grover search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroverSearchConfig {
    /// Growth factor `λ > 1` of the rotation bound after a failed search.
    pub lambda: f64,
    /// Consecutive non-improving iterations tolerated before stopping.
    pub patience: usize,
    /// Hard cap on iterations; `None` uses `10·(C + 1)·⌈√|P|⌉`.
    pub max_iterations: Option<usize>,
    /// Replace an accepted candidate's value by a fresh phase-estimation
    /// sample of that policy.
    pub reestimate: bool,
}

impl Default for GroverSearchConfig {
    fn default() -> Self {
        Self {
            lambda: 8.0 / 7.0,
            patience: 30,
            max_iterations: None,
            reestimate: false,
        }
    }
}

impl GroverSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 1.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("λ = {} must exceed 1", self.lambda)));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::Config("max_iterations must be positive".into()));
        }
        Ok(())
    }

    pub fn iteration_cap(&self, num_policies: usize) -> usize {
        self.max_iterations.unwrap_or_else(|| {
            let root = (num_policies as f64).sqrt().ceil() as usize;
            10 * (self.patience + 1) * root.max(1)
        })
    }
}

/// Outcome of one exponential-search step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QpiStep {
    pub policy: usize,
    pub outcome: usize,
    pub value: f64,
    pub rotations: u64,
    /// `m` used to draw the rotation count.
    pub m: f64,
    /// `m` for the next step: 1 after an improvement, `λm` otherwise.
    pub next_m: f64,
    pub improved: bool,
}

/// Draws `j` uniformly from `{0, …, ⌈m − 1⌉}`, measures after `j` Grover
/// rotations and updates `m`.
pub fn exponential_qpi_step<R: Rng + ?Sized>(
    search: &GroverSearchConfig,
    m: f64,
    dist: &SearchDistribution,
    threshold: f64,
    rng: &mut R,
) -> QpiStep {
    let upper = (m - 1.0).ceil().max(0.0) as u64;
    let rotations = rng.gen_range(0..=upper);
    let (policy, outcome) = grover_amplified_sample(dist, threshold, rotations, rng);
    let value = dist.decode(outcome);
    let improved = value > threshold;
    QpiStep {
        policy,
        outcome,
        value,
        rotations,
        m,
        next_m: if improved { 1.0 } else { search.lambda * m },
        improved,
    }
}

/// One row of the policy-iteration trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Current best estimate `v_k` after this iteration.
    pub value: f64,
    /// Current best policy after this iteration.
    pub policy: usize,
    pub candidate_policy: usize,
    pub candidate_value: f64,
    pub rotations: u64,
    pub m: f64,
    pub accepted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    /// The iteration cap was reached; the trace is partial.
    Aborted,
}

/// Result of quantum policy iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QpiRun {
    pub start_policy: usize,
    pub initial_value: f64,
    pub policy: usize,
    pub value: f64,
    pub records: Vec<IterationRecord>,
    pub total_rotations: u64,
    /// Rotations excluding those of the last `C` iterations.
    pub non_patience_rotations: u64,
    /// Applications of a single-policy `A^φ` or its inverse, counting every
    /// phase-estimation circuit inside `A_QPI` as `2^{t+1} − 1`.
    pub a_applications: u64,
    pub status: RunStatus,
}

impl QpiRun {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// Quantum policy iteration on a prebuilt search distribution. Starting from
/// `start` and a single phase-estimation sample of its value, repeatedly
/// searches for a policy whose estimate strictly beats the current one and
/// stops after `patience + 1` consecutive failures.
pub fn policy_iteration_on<R: Rng + ?Sized>(
    dist: &SearchDistribution,
    start: usize,
    search: &GroverSearchConfig,
    rng: &mut R,
) -> Result<QpiRun> {
    search.validate()?;
    if start >= dist.num_policies() {
        return Err(Error::Config(format!(
            "start policy {start} outside a set of {}",
            dist.num_policies()
        )));
    }
    let start_dist = dist.policy_distribution(start)?;
    let per_qpe = dist.config().a_applications();
    let mut a_applications = per_qpe;
    let initial_value = dist.decode(start_dist.sample(rng));

    let cap = search.iteration_cap(dist.num_policies());
    let mut policy = start;
    let mut value = initial_value;
    let mut m = 1.0;
    let mut fails = 0;
    let mut records = Vec::new();
    let mut status = RunStatus::Converged;
    while fails <= search.patience {
        if records.len() == cap {
            status = RunStatus::Aborted;
            break;
        }
        let step = exponential_qpi_step(search, m, dist, value, rng);
        a_applications += (2 * step.rotations + 1) * per_qpe;
        m = step.next_m;
        let accepted = step.improved;
        if accepted {
            policy = step.policy;
            value = step.value;
            if search.reestimate {
                value = dist.decode(dist.policy_distribution(policy)?.sample(rng));
                a_applications += per_qpe;
            }
            fails = 0;
        } else {
            fails += 1;
        }
        records.push(IterationRecord {
            k: records.len() + 1,
            value,
            policy,
            candidate_policy: step.policy,
            candidate_value: step.value,
            rotations: step.rotations,
            m: step.m,
            accepted,
        });
    }
    let total_rotations = records.iter().map(|r| r.rotations).sum();
    let keep = records.len().saturating_sub(search.patience);
    let non_patience_rotations = records[..keep].iter().map(|r| r.rotations).sum();
    Ok(QpiRun {
        start_policy: start,
        initial_value,
        policy,
        value,
        records,
        total_rotations,
        non_patience_rotations,
        a_applications,
        status,
    })
}
