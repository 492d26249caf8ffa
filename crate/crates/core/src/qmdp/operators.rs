use num_complex::Complex64;

use super::encoding::{for_each_reward_string, ReturnEncoding};
use super::mdp::{Mdp, Policy, TwoArmedBandit};
use crate::error::{Error, Result};
use crate::statevec::{
    complete_to_unitary, pauli_x, ry, CMatrix, Circuit, Control, Gate, GateOp, RegisterLayout,
    RegisterRole, StateVector,
};

const ANCILLA: &str = "anc";
const RETURN: &str = "ret";

fn state_reg(h: usize) -> String {
    format!("s{h}")
}

fn action_reg(h: usize) -> String {
    format!("a{h}")
}

fn reward_reg(h: usize) -> String {
    format!("r{h}")
}

/// Layout of `T^H ⊗ G ⊗ ancilla`:
/// `s0, a1, r1, s1, …, aH, rH, sH, ret, anc`.
pub fn trajectory_layout(mdp: &Mdp, encoding: &ReturnEncoding) -> Result<RegisterLayout> {
    let mut layout = RegisterLayout::new();
    layout.push(state_reg(0), mdp.state_qubits(), RegisterRole::State)?;
    for h in 1..=mdp.horizon() {
        layout.push(action_reg(h), mdp.action_qubits(), RegisterRole::Action)?;
        layout.push(reward_reg(h), mdp.reward_qubits(), RegisterRole::Reward)?;
        layout.push(state_reg(h), mdp.state_qubits(), RegisterRole::State)?;
    }
    layout.push(RETURN, encoding.width(), RegisterRole::Return)?;
    layout.push(ANCILLA, 1, RegisterRole::Ancilla)?;
    Ok(layout)
}

/// Registers holding one trajectory, in trajectory order.
pub fn trajectory_registers(mdp: &Mdp) -> Vec<String> {
    let mut regs = vec![state_reg(0)];
    for h in 1..=mdp.horizon() {
        regs.extend([action_reg(h), reward_reg(h), state_reg(h)]);
    }
    regs
}

/// Unitary whose column at each `position` is the given vector; the other
/// columns are filled, in increasing index order, by deterministic completion.
/// `specified` must be sorted by position.
fn complete_isometry(dim: usize, specified: &[(usize, Vec<Complex64>)]) -> Result<CMatrix> {
    let columns: Vec<Vec<Complex64>> = specified.iter().map(|(_, v)| v.clone()).collect();
    let completed = complete_to_unitary(&columns, dim)?;
    let mut out = CMatrix::zeros(dim);
    let mut given = specified.iter().enumerate().peekable();
    let mut next_extra = specified.len();
    for j in 0..dim {
        let src = match given.peek() {
            Some((k, (pos, _))) if *pos == j => {
                let k = *k;
                given.next();
                k
            }
            _ => {
                next_extra += 1;
                next_extra - 1
            }
        };
        for i in 0..dim {
            out[(i, j)] = completed[(i, src)];
        }
    }
    Ok(out)
}

fn sqrt_amp(p: f64) -> Complex64 {
    Complex64::new(p.max(0.0).sqrt(), 0.0)
}

/// Policy operator on `S ⊗ A`: `|s⟩|0⟩ ↦ Σ_a √π(a|s) |s⟩|a⟩`.
pub fn build_policy_operator(mdp: &Mdp, policy: &Policy) -> Result<CMatrix> {
    policy.check_against(mdp)?;
    let qa = mdp.action_qubits();
    let dim = 1usize << (mdp.state_qubits() + qa);
    let specified: Vec<_> = (0..mdp.num_states())
        .map(|s| {
            let mut col = vec![Complex64::new(0.0, 0.0); dim];
            for a in 0..mdp.num_actions() {
                col[(s << qa) | a] = sqrt_amp(policy.prob(s, a));
            }
            (s << qa, col)
        })
        .collect();
    complete_isometry(dim, &specified)
}

/// Environment operator on `S ⊗ A ⊗ R ⊗ S`:
/// `|s⟩|a⟩|0⟩|0⟩ ↦ Σ_{r,s'} √p(r,s'|s,a) |s⟩|a⟩|r⟩|s'⟩`.
pub fn build_environment_operator(mdp: &Mdp) -> Result<CMatrix> {
    let (qs, qa, qr) = (mdp.state_qubits(), mdp.action_qubits(), mdp.reward_qubits());
    let dim = 1usize << (2 * qs + qa + qr);
    let index =
        |s: usize, a: usize, r: usize, next: usize| (((((s << qa) | a) << qr) | r) << qs) | next;
    let mut specified = Vec::with_capacity(mdp.num_states() * mdp.num_actions());
    for s in 0..mdp.num_states() {
        for a in 0..mdp.num_actions() {
            let mut col = vec![Complex64::new(0.0, 0.0); dim];
            for r in 0..mdp.num_rewards() {
                for next in 0..mdp.num_states() {
                    col[index(s, a, r, next)] = sqrt_amp(mdp.prob(s, a, r, next));
                }
            }
            specified.push((index(s, a, 0, 0), col));
        }
    }
    complete_isometry(dim, &specified)
}

/// Step operator `S = E ∘ Π` on `S ⊗ A ⊗ R ⊗ S`.
pub fn step_operator(mdp: &Mdp, policy: &Policy) -> Result<CMatrix> {
    let pi = build_policy_operator(mdp, policy)?;
    let env = build_environment_operator(mdp)?;
    let rest = CMatrix::identity(1usize << (mdp.reward_qubits() + mdp.state_qubits()));
    Ok(&env * &pi.kron(&rest))
}

/// `|0⟩ ↦ |s0⟩ ⊗ … ↦ Σ c_t |t⟩`: prepares the start state, then applies the
/// step operator to each `(s_{h−1}, a_h, r_h, s_h)` block.
pub fn mdp_operator(mdp: &Mdp, policy: &Policy, layout: &RegisterLayout) -> Result<Circuit> {
    let pi = build_policy_operator(mdp, policy)?;
    let env = build_environment_operator(mdp)?;
    let mut circuit = Circuit::new();

    let s0: Vec<usize> = layout.qubits(&state_reg(0))?.collect();
    for (b, &q) in s0.iter().enumerate() {
        if mdp.initial_state() >> (s0.len() - 1 - b) & 1 == 1 {
            circuit.push(Gate::single(pauli_x(), q)?);
        }
    }
    for h in 1..=mdp.horizon() {
        let policy_qubits = layout.qubits_of(&[&state_reg(h - 1), &action_reg(h)])?;
        let env_qubits = layout.qubits_of(&[
            &state_reg(h - 1),
            &action_reg(h),
            &reward_reg(h),
            &state_reg(h),
        ])?;
        if !policy_qubits.is_empty() {
            circuit.push(Gate::dense(pi.clone(), policy_qubits)?);
        }
        circuit.push(Gate::dense(env.clone(), env_qubits)?);
    }
    Ok(circuit)
}

/// Return operator: `|r_1…r_H⟩|y⟩ ↦ |r_1…r_H⟩|y ⊕ enc(Σ γ^{h−1} r_h)⟩`,
/// a permutation on the reward registers and the return register.
pub fn return_operator(
    mdp: &Mdp,
    encoding: &ReturnEncoding,
    layout: &RegisterLayout,
) -> Result<Gate> {
    let qr = mdp.reward_qubits();
    let w = encoding.width();
    let h_count = mdp.horizon();
    let reward_names: Vec<String> = (1..=h_count).map(reward_reg).collect();
    let mut names: Vec<&str> = reward_names.iter().map(String::as_str).collect();
    names.push(RETURN);
    let targets = layout.qubits_of(&names)?;
    let total_bits = qr * h_count + w;
    if total_bits > 24 {
        return Err(Error::QubitBudget {
            requested: total_bits,
            budget: 24,
        });
    }

    let mut perm = Vec::with_capacity(1usize << total_bits);
    for rewards_part in 0..1usize << (qr * h_count) {
        let idx: Vec<usize> = (0..h_count)
            .map(|h| (rewards_part >> (qr * (h_count - 1 - h))) & ((1usize << qr) - 1))
            .collect();
        // reward codes beyond the reward list never occur; leave them unchanged
        let code = if idx.iter().all(|&r| r < mdp.num_rewards()) {
            encoding.encode(super::encoding::reward_string_return(mdp, &idx))? as usize
        } else {
            0
        };
        perm.extend((0..1usize << w).map(|y| (rewards_part << w) | (y ^ code)));
    }
    Gate::new(GateOp::Permutation(perm), targets, Vec::new())
}

/// Register codes the return operator can write for `mdp`, sorted.
pub fn reachable_codes(mdp: &Mdp, encoding: &ReturnEncoding) -> Result<Vec<u64>> {
    let mut codes = Vec::new();
    let mut failure = None;
    for_each_reward_string(mdp, |ret| match encoding.encode(ret) {
        Ok(c) => codes.push(c),
        Err(e) => failure = Some(e),
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    codes.sort_unstable();
    codes.dedup();
    Ok(codes)
}

/// Value-encoding rotation: for each return code `x` in `codes`,
/// `|x⟩|0⟩ ↦ |x⟩(√(1−φ(x))|0⟩ + √φ(x)|1⟩)` via `R_y(2 arcsin √φ(x))`
/// on the ancilla, controlled on the return register holding `x`.
/// Codes not listed are left untouched.
pub fn phi_operator(
    encoding: &ReturnEncoding,
    layout: &RegisterLayout,
    codes: &[u64],
) -> Result<Circuit> {
    let ret: Vec<usize> = layout.qubits(RETURN)?.collect();
    let anc = layout.qubits(ANCILLA)?.start;
    let w = ret.len();
    let mut circuit = Circuit::new();
    for &code in codes {
        let x = encoding.decode(code);
        let phi = encoding.phi(x);
        if !(-1e-12..=1.0 + 1e-12).contains(&phi) {
            return Err(Error::Config(format!(
                "return {x} lies outside [g, ḡ] = [{}, {}]",
                encoding.lower, encoding.upper
            )));
        }
        let phi = phi.clamp(0.0, 1.0);
        if phi == 0.0 {
            continue;
        }
        let controls = ret
            .iter()
            .enumerate()
            .map(|(b, &q)| Control {
                qubit: q,
                value: code >> (w - 1 - b) & 1 == 1,
            })
            .collect();
        circuit.push(Gate::new(
            GateOp::Dense(ry(2.0 * phi.sqrt().asin())?),
            vec![anc],
            controls,
        )?);
    }
    Ok(circuit)
}

/// A circuit preparing `A|0⟩` on `layout`, where the ancilla-|1⟩
/// probability encodes the quantity of interest.
#[derive(Clone, Debug)]
pub struct StatePreparation {
    pub layout: RegisterLayout,
    pub circuit: Circuit,
    /// Global index of the flag qubit.
    pub ancilla: usize,
    pub encoding: ReturnEncoding,
}

impl StatePreparation {
    pub fn prepare(&self) -> Result<StateVector> {
        let mut state = StateVector::zero(self.layout.clone())?;
        self.circuit.apply(&mut state)?;
        Ok(state)
    }

    /// Exact probability that the ancilla reads 1.
    pub fn good_probability(&self) -> Result<f64> {
        let state = self.prepare()?;
        Ok(state.measure_probabilities(&[ANCILLA])?.probability(1))
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }
}

/// `A^φ = (id ⊗ Φ) ∘ G ∘ M` on `T^H ⊗ G ⊗ ancilla`.
pub fn a_qpe(mdp: &Mdp, policy: &Policy, encoding: &ReturnEncoding) -> Result<StatePreparation> {
    let layout = trajectory_layout(mdp, encoding)?;
    let mut circuit = mdp_operator(mdp, policy, &layout)?;
    circuit.push(return_operator(mdp, encoding, &layout)?);
    circuit.append(&phi_operator(
        encoding,
        &layout,
        &reachable_codes(mdp, encoding)?,
    )?);
    let ancilla = layout.qubits(ANCILLA)?.start;
    Ok(StatePreparation {
        layout,
        circuit,
        ancilla,
        encoding: *encoding,
    })
}

/// One bandit interaction on qubits `[action, reward]`: `R_y(θ^π)` on the
/// action, then `R_y(θ^←)` / `R_y(θ^→)` on the reward conditioned on the action.
pub fn bandit_step_circuit(bandit: &TwoArmedBandit, policy_left: f64) -> Result<Circuit> {
    if !(0.0..=1.0).contains(&policy_left) {
        return Err(Error::PolicyMismatch(format!(
            "π(←) = {policy_left} outside [0, 1]"
        )));
    }
    let angle = |p: f64| 2.0 * p.sqrt().acos();
    Ok(Circuit::from_gates(vec![
        Gate::single(ry(angle(policy_left))?, 0)?,
        Gate::new(
            GateOp::Dense(ry(angle(bandit.p0_left))?),
            vec![1],
            vec![Control::off(0)],
        )?,
        Gate::new(
            GateOp::Dense(ry(angle(bandit.p0_right))?),
            vec![1],
            vec![Control::on(0)],
        )?,
    ]))
}
