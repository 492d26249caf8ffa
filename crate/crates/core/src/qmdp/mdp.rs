use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-10;

/// Default cap on the number of trajectories [`exact_value`] will enumerate.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// A finite-horizon MDP with a fixed start state.
///
/// `dynamics[s][a][r][s']` is `p(r, s' | s, a)` where `r` indexes `rewards`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMdp", into = "RawMdp")]
pub struct Mdp {
    num_states: usize,
    num_actions: usize,
    rewards: Vec<f64>,
    dynamics: Vec<Vec<Vec<Vec<f64>>>>,
    initial_state: usize,
    discount: f64,
    horizon: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMdp {
    num_states: usize,
    num_actions: usize,
    rewards: Vec<f64>,
    dynamics: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    initial_state: usize,
    discount: f64,
    horizon: usize,
}

impl TryFrom<RawMdp> for Mdp {
    type Error = Error;

    fn try_from(raw: RawMdp) -> Result<Self> {
        Mdp::new(
            raw.num_states,
            raw.num_actions,
            raw.rewards,
            raw.dynamics,
            raw.initial_state,
            raw.discount,
            raw.horizon,
        )
    }
}

impl From<Mdp> for RawMdp {
    fn from(m: Mdp) -> Self {
        RawMdp {
            num_states: m.num_states,
            num_actions: m.num_actions,
            rewards: m.rewards,
            dynamics: m.dynamics,
            initial_state: m.initial_state,
            discount: m.discount,
            horizon: m.horizon,
        }
    }
}

impl Mdp {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        rewards: Vec<f64>,
        dynamics: Vec<Vec<Vec<Vec<f64>>>>,
        initial_state: usize,
        discount: f64,
        horizon: usize,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMdp(msg));
        if num_states == 0 || num_actions == 0 || rewards.is_empty() {
            return bad("states, actions and rewards must be non-empty".into());
        }
        if let Some(r) = rewards.iter().find(|r| !r.is_finite()) {
            return bad(format!("reward {r} is not finite"));
        }
        if initial_state >= num_states {
            return bad(format!("initial state {initial_state} out of range"));
        }
        if !(0.0..=1.0).contains(&discount) {
            return bad(format!("discount {discount} outside [0, 1]"));
        }
        if horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if dynamics.len() != num_states {
            return bad(format!(
                "dynamics has {} states, expected {num_states}",
                dynamics.len()
            ));
        }
        for (s, per_action) in dynamics.iter().enumerate() {
            if per_action.len() != num_actions {
                return bad(format!("dynamics[{s}] has {} actions", per_action.len()));
            }
            for (a, per_reward) in per_action.iter().enumerate() {
                if per_reward.len() != rewards.len() {
                    return bad(format!(
                        "dynamics[{s}][{a}] has {} rewards",
                        per_reward.len()
                    ));
                }
                let mut total = 0.0;
                for row in per_reward {
                    if row.len() != num_states {
                        return bad(format!(
                            "dynamics[{s}][{a}] has a row of {} next states",
                            row.len()
                        ));
                    }
                    for &p in row {
                        if !(0.0..=1.0).contains(&p) {
                            return bad(format!("probability {p} outside [0, 1] at ({s}, {a})"));
                        }
                        total += p;
                    }
                }
                if (total - 1.0).abs() > PROB_TOL {
                    return bad(format!("p(·|{s}, {a}) sums to {total}"));
                }
            }
        }
        Ok(Self {
            num_states,
            num_actions,
            rewards,
            dynamics,
            initial_state,
            discount,
            horizon,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn num_rewards(&self) -> usize {
        self.rewards.len()
    }

    /// `p(r, s' | s, a)` with `r` a reward index.
    #[inline]
    pub fn prob(&self, s: usize, a: usize, r: usize, next: usize) -> f64 {
        self.dynamics[s][a][r][next]
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// The same MDP with a different horizon.
    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidMdp("horizon must be at least 1".into()));
        }
        Ok(Self {
            horizon,
            ..self.clone()
        })
    }

    pub fn with_discount(&self, discount: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&discount) {
            return Err(Error::InvalidMdp(format!(
                "discount {discount} outside [0, 1]"
            )));
        }
        Ok(Self {
            discount,
            ..self.clone()
        })
    }

    /// Qubits for the state register (zero for single-state MDPs).
    pub fn state_qubits(&self) -> usize {
        bits_for(self.num_states)
    }

    pub fn action_qubits(&self) -> usize {
        bits_for(self.num_actions)
    }

    pub fn reward_qubits(&self) -> usize {
        bits_for(self.rewards.len())
    }

    /// Number of length-H trajectories, `(|A||R||S|)^H`.
    pub fn trajectory_count(&self) -> u128 {
        let per_step = (self.num_actions * self.rewards.len() * self.num_states) as u128;
        per_step.saturating_pow(self.horizon as u32)
    }
}

/// `⌈log2 n⌉`, so one option needs no qubits.
pub fn bits_for(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Stochastic policy `table[s][a] = π(a|s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Policy {
    table: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for Policy {
    type Error = Error;

    fn try_from(table: Vec<Vec<f64>>) -> Result<Self> {
        Policy::new(table)
    }
}

impl From<Policy> for Vec<Vec<f64>> {
    fn from(p: Policy) -> Self {
        p.table
    }
}

impl Policy {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::PolicyMismatch("empty policy table".into()));
        }
        for (s, row) in table.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::PolicyMismatch(format!("no actions for state {s}")));
            }
            if let Some(p) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(Error::PolicyMismatch(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > PROB_TOL {
                return Err(Error::PolicyMismatch(format!("π(·|{s}) sums to {total}")));
            }
        }
        Ok(Self { table })
    }

    /// Two-action single-state policy choosing action 0 ("left") with `left`.
    pub fn bandit(left: f64) -> Result<Self> {
        Self::new(vec![vec![left, 1.0 - left]])
    }

    /// Deterministic policy taking `actions[s]` in state `s`.
    pub fn deterministic(actions: &[usize], num_actions: usize) -> Result<Self> {
        Self::new(
            actions
                .iter()
                .map(|&a| {
                    (0..num_actions)
                        .map(|b| if a == b { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect(),
        )
    }

    #[inline]
    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.table[s][a]
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub fn check_against(&self, mdp: &Mdp) -> Result<()> {
        if self.table.len() != mdp.num_states() {
            return Err(Error::PolicyMismatch(format!(
                "policy covers {} states, MDP has {}",
                self.table.len(),
                mdp.num_states()
            )));
        }
        if let Some(row) = self.table.iter().find(|r| r.len() != mdp.num_actions()) {
            return Err(Error::PolicyMismatch(format!(
                "policy row has {} actions, MDP has {}",
                row.len(),
                mdp.num_actions()
            )));
        }
        Ok(())
    }
}

/// Two-armed bandit: one state, actions left (0) and right (1), rewards {0, 1}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoArmedBandit {
    /// `p(0 | ←)`
    pub p0_left: f64,
    /// `p(0 | →)`
    pub p0_right: f64,
}

impl TwoArmedBandit {
    pub fn new(p0_left: f64, p0_right: f64) -> Result<Self> {
        for p in [p0_left, p0_right] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidMdp(format!(
                    "bandit probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(Self { p0_left, p0_right })
    }

    pub fn to_mdp(&self, horizon: usize, discount: f64) -> Result<Mdp> {
        let arm = |p0: f64| vec![vec![p0], vec![1.0 - p0]];
        Mdp::new(
            1,
            2,
            vec![0.0, 1.0],
            vec![vec![arm(self.p0_left), arm(self.p0_right)]],
            0,
            discount,
            horizon,
        )
    }

    /// Value of the best arm over one round.
    pub fn best_arm_value(&self) -> f64 {
        (1.0 - self.p0_left).max(1.0 - self.p0_right)
    }
}

/// One interaction `(a_h, r_h, s_h)`, rewards as indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub action: usize,
    pub reward: usize,
    pub next_state: usize,
}

/// Calls `visit(steps, probability)` for every length-H trajectory of nonzero probability.
pub fn for_each_trajectory(
    mdp: &Mdp,
    policy: &Policy,
    budget: u128,
    mut visit: impl FnMut(&[Step], f64),
) -> Result<()> {
    policy.check_against(mdp)?;
    let requested = mdp.trajectory_count();
    if requested > budget {
        return Err(Error::EnumerationBudget { requested, budget });
    }
    let mut path = Vec::with_capacity(mdp.horizon());
    walk(mdp, policy, mdp.initial_state(), 1.0, &mut path, &mut visit);
    Ok(())
}

fn walk(
    mdp: &Mdp,
    policy: &Policy,
    state: usize,
    prob: f64,
    path: &mut Vec<Step>,
    visit: &mut impl FnMut(&[Step], f64),
) {
    if path.len() == mdp.horizon() {
        visit(path, prob);
        return;
    }
    for a in 0..mdp.num_actions() {
        let pa = policy.prob(state, a);
        if pa == 0.0 {
            continue;
        }
        for r in 0..mdp.num_rewards() {
            for next in 0..mdp.num_states() {
                let p = mdp.prob(state, a, r, next);
                if p == 0.0 {
                    continue;
                }
                path.push(Step {
                    action: a,
                    reward: r,
                    next_state: next,
                });
                walk(mdp, policy, next, prob * pa * p, path, visit);
                path.pop();
            }
        }
    }
}

/// Discounted return `Σ γ^{h−1} r_h` of a trajectory.
pub fn discounted_return(mdp: &Mdp, steps: &[Step]) -> f64 {
    let mut weight = 1.0;
    let mut total = 0.0;
    for step in steps {
        total += weight * mdp.rewards()[step.reward];
        weight *= mdp.discount();
    }
    total
}

/// `v_π^H(s0)` by full trajectory enumeration.
pub fn exact_value(mdp: &Mdp, policy: &Policy) -> Result<f64> {
    exact_value_with_budget(mdp, policy, DEFAULT_ENUMERATION_BUDGET)
}

pub fn exact_value_with_budget(mdp: &Mdp, policy: &Policy, budget: u128) -> Result<f64> {
    let mut value = 0.0;
    for_each_trajectory(mdp, policy, budget, |steps, p| {
        value += p * discounted_return(mdp, steps);
    })?;
    Ok(value)
}
