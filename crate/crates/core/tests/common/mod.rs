#![allow(dead_code)]

use qpi_core::qmdp::{for_each_trajectory, Mdp, Policy, DEFAULT_ENUMERATION_BUDGET};
use qpi_core::qmdp::{ReturnEncoding, StatePreparation};
use qpi_core::statevec::{ry, Circuit, Gate, RegisterLayout, RegisterRole};
use rand::Rng;

/// Random probability vector with some exact zeros.
pub fn random_simplex<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len)
        .map(|_| {
            if rng.gen_bool(0.25) {
                0.0
            } else {
                rng.gen::<f64>()
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..len)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Random MDP with integer rewards in `0..=3`.
pub fn random_mdp<R: Rng>(
    rng: &mut R,
    max_states: usize,
    max_actions: usize,
    max_rewards: usize,
    max_horizon: usize,
) -> Mdp {
    let ns = rng.gen_range(1..=max_states);
    let na = rng.gen_range(1..=max_actions);
    let nr = rng.gen_range(1..=max_rewards);
    let mut rewards: Vec<f64> = (0..=3).map(f64::from).collect();
    while rewards.len() > nr {
        rewards.remove(rng.gen_range(0..rewards.len()));
    }
    let dynamics = (0..ns)
        .map(|_| {
            (0..na)
                .map(|_| {
                    let flat = random_simplex(rng, nr * ns);
                    (0..nr)
                        .map(|r| flat[r * ns..(r + 1) * ns].to_vec())
                        .collect()
                })
                .collect()
        })
        .collect();
    let horizon = rng.gen_range(1..=max_horizon);
    let discount = [1.0, 0.5][rng.gen_range(0..2)];
    Mdp::new(
        ns,
        na,
        rewards,
        dynamics,
        rng.gen_range(0..ns),
        discount,
        horizon,
    )
    .unwrap()
}

pub fn random_policy<R: Rng>(rng: &mut R, mdp: &Mdp) -> Policy {
    Policy::new(
        (0..mdp.num_states())
            .map(|_| random_simplex(rng, mdp.num_actions()))
            .collect(),
    )
    .unwrap()
}

/// Trajectory distribution by enumeration, indexed like the measured
/// trajectory registers `s0, a1, r1, s1, …` (big-endian).
pub fn enumerated_trajectories(mdp: &Mdp, policy: &Policy) -> Vec<f64> {
    let (qs, qa, qr) = (mdp.state_qubits(), mdp.action_qubits(), mdp.reward_qubits());
    let bits = qs + mdp.horizon() * (qa + qr + qs);
    let mut probs = vec![0.0; 1 << bits];
    for_each_trajectory(mdp, policy, DEFAULT_ENUMERATION_BUDGET, |steps, p| {
        let mut idx = mdp.initial_state();
        for s in steps {
            idx = (idx << qa) | s.action;
            idx = (idx << qr) | s.reward;
            idx = (idx << qs) | s.next_state;
        }
        probs[idx] += p;
    })
    .unwrap();
    probs
}

/// A one-qubit preparation `R_y(2 asin √p)|0⟩`, so `|c₁|² = p`.
pub fn flag_preparation(p: f64) -> StatePreparation {
    let layout = RegisterLayout::new()
        .with("anc", 1, RegisterRole::Ancilla)
        .unwrap();
    let angle = 2.0 * p.sqrt().asin();
    StatePreparation {
        layout,
        circuit: Circuit::from_gates(vec![Gate::single(ry(angle).unwrap(), 0).unwrap()]),
        ancilla: 0,
        encoding: ReturnEncoding::new(1, 0, false, 0.0, 1.0).unwrap(),
    }
}
