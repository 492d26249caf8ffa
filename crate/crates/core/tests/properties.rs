mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qpi_core::ae::{
    config_for, decode_value, epsilon_bound, lemma1_bound, phase_estimation, q_qpe_operator,
    two_eigenphase_distribution, PowerMethod, QpeConfig,
};
use qpi_core::baselines::TrajectorySampler;
use qpi_core::distribution::OutcomeDistribution;
use qpi_core::qmdp::{
    a_qpe, bandit_step_circuit, build_environment_operator, build_policy_operator, exact_value,
    for_each_trajectory, mdp_operator, step_operator, trajectory_layout, trajectory_registers,
    Policy, ReturnEncoding, TwoArmedBandit, DEFAULT_ENUMERATION_BUDGET,
};
use qpi_core::qpi::{
    amplified_success, build_search_distribution, policy_iteration_on, statevector_qpi_backend,
    GroverSearchConfig, PolicySet, RunStatus, SearchDistribution,
};
use qpi_core::seed::rng_for;
use qpi_core::statevec::{
    complete_to_unitary, pauli_x, qft_on, Circuit, Control, Gate, GateOp, RegisterLayout,
    RegisterRole, StateVector,
};
use qpi_core::stats::median;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn random_state(rng: &mut ChaCha8Rng, qubits: usize) -> StateVector {
    let layout = RegisterLayout::new()
        .with("q", qubits, RegisterRole::State)
        .unwrap();
    StateVector::from_amplitudes(layout, random_vector(rng, 1 << qubits)).unwrap()
}

/// Random dense gate on one or two distinct qubits with up to one control.
fn random_gate(rng: &mut ChaCha8Rng, qubits: usize) -> Gate {
    let mut free: Vec<usize> = (0..qubits).collect();
    let width = if qubits >= 2 && rng.gen_bool(0.5) {
        2
    } else {
        1
    };
    let mut targets = Vec::new();
    for _ in 0..width {
        targets.push(free.swap_remove(rng.gen_range(0..free.len())));
    }
    let u = complete_to_unitary(&[random_vector(rng, 1 << width)], 1 << width).unwrap();
    let controls = if !free.is_empty() && rng.gen_bool(0.5) {
        let q = free[rng.gen_range(0..free.len())];
        vec![if rng.gen_bool(0.5) {
            Control::on(q)
        } else {
            Control::off(q)
        }]
    } else {
        Vec::new()
    };
    Gate::new(GateOp::Dense(u), targets, controls).unwrap()
}

fn bandit_mdp(p0_left: f64, p0_right: f64, horizon: usize) -> qpi_core::qmdp::Mdp {
    TwoArmedBandit::new(p0_left, p0_right)
        .unwrap()
        .to_mdp(horizon, 1.0)
        .unwrap()
}

fn random_search(rng: &mut ChaCha8Rng, policies: usize, t: usize) -> SearchDistribution {
    let config = QpeConfig::with_t_equal_n(t, 0.0, 1.0).unwrap();
    let per: Vec<OutcomeDistribution> = (0..policies)
        .map(|_| OutcomeDistribution::new(t, common::random_simplex(rng, 1 << t)).unwrap())
        .collect();
    SearchDistribution::from_distributions(&config, &per).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // statevec

    #[test]
    fn gates_preserve_norm(seed in any::<u64>(), qubits in 1usize..=6) {
        let mut rng = rng_for(seed, 0);
        let mut state = random_state(&mut rng, qubits);
        for _ in 0..40 {
            state.apply(&random_gate(&mut rng, qubits)).unwrap();
        }
        prop_assert!((state.norm_sqr() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn sequential_gates_match_composed_matrix(seed in any::<u64>(), qubits in 1usize..=3) {
        let mut rng = rng_for(seed, 1);
        let circuit = Circuit::from_gates(vec![random_gate(&mut rng, qubits), random_gate(&mut rng, qubits)]);
        let state = random_state(&mut rng, qubits);
        let expected = circuit.to_matrix(qubits).unwrap().mul_vec(state.amplitudes());
        let mut actual = state.clone();
        circuit.apply(&mut actual).unwrap();
        for (a, b) in actual.amplitudes().iter().zip(&expected) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn qft_round_trip(seed in any::<u64>(), qubits in 1usize..=8) {
        let mut rng = rng_for(seed, 2);
        let state = random_state(&mut rng, qubits);
        let all: Vec<usize> = (0..qubits).collect();
        let forward = qft_on(&all).unwrap();
        let mut s = state.clone();
        forward.apply(&mut s).unwrap();
        forward.inverse().apply(&mut s).unwrap();
        prop_assert!((s.fidelity(&state) - 1.0).abs() <= 1e-9);
        for (a, b) in s.amplitudes().iter().zip(state.amplitudes()) {
            prop_assert!((a - b).norm() <= 1e-9);
        }
    }

    #[test]
    fn marginals_sum_the_joint(seed in any::<u64>(), a in 1usize..=3, b in 1usize..=3) {
        let mut rng = rng_for(seed, 3);
        let layout = RegisterLayout::new()
            .with("a", a, RegisterRole::State).unwrap()
            .with("b", b, RegisterRole::State).unwrap();
        let state = StateVector::from_amplitudes(layout, random_vector(&mut rng, 1 << (a + b))).unwrap();
        let joint = state.measure_probabilities(&["a", "b"]).unwrap();
        let first = state.measure_probabilities(&["a"]).unwrap();
        let second = state.measure_probabilities(&["b"]).unwrap();
        for x in 0..1usize << a {
            let sum: f64 = (0..1usize << b).map(|y| joint.probability((x << b) | y)).sum();
            prop_assert!((sum - first.probability(x)).abs() <= 1e-12);
        }
        for y in 0..1usize << b {
            let sum: f64 = (0..1usize << a).map(|x| joint.probability((x << b) | y)).sum();
            prop_assert!((sum - second.probability(y)).abs() <= 1e-12);
        }
    }

    // qmdp

    #[test]
    fn operators_are_unitary(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 4);
        let mdp = common::random_mdp(&mut rng, 2, 3, 3, 2);
        let policy = common::random_policy(&mut rng, &mdp);
        prop_assert!(build_policy_operator(&mdp, &policy).unwrap().is_unitary(1e-10));
        prop_assert!(build_environment_operator(&mdp).unwrap().is_unitary(1e-10));
        prop_assert!(step_operator(&mdp, &policy).unwrap().is_unitary(1e-10));
    }

    #[test]
    fn trajectory_qsample_matches_enumeration(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 5);
        let mdp = common::random_mdp(&mut rng, 2, 3, 2, 3);
        let policy = common::random_policy(&mut rng, &mdp);
        let enc = ReturnEncoding::auto(&mdp).unwrap();
        let layout = trajectory_layout(&mdp, &enc).unwrap();
        let mut state = StateVector::zero(layout.clone()).unwrap();
        mdp_operator(&mdp, &policy, &layout).unwrap().apply(&mut state).unwrap();
        let regs = trajectory_registers(&mdp);
        let names: Vec<&str> = regs.iter().map(String::as_str).collect();
        let measured = state.measure_probabilities(&names).unwrap();
        for (x, p) in common::enumerated_trajectories(&mdp, &policy).iter().enumerate() {
            prop_assert!((measured.probability(x) - p).abs() <= 1e-10);
        }
    }

    #[test]
    fn flag_probability_encodes_value(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 6);
        let mdp = common::random_mdp(&mut rng, 2, 2, 3, 2);
        let policy = common::random_policy(&mut rng, &mdp);
        let enc = ReturnEncoding::auto(&mdp).unwrap();
        let prep = a_qpe(&mdp, &policy, &enc).unwrap();
        let p = prep.good_probability().unwrap();
        let mut expected = 0.0;
        for_each_trajectory(&mdp, &policy, DEFAULT_ENUMERATION_BUDGET, |steps, prob| {
            expected += prob * enc.phi(qpi_core::qmdp::discounted_return(&mdp, steps));
        }).unwrap();
        prop_assert!((p - expected).abs() <= 1e-10);
        prop_assert!((enc.phi_inverse(p) - exact_value(&mdp, &policy).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn bandit_circuit_matches_generic_step(left in 0.0f64..=1.0, p0l in 0.0f64..=1.0, p0r in 0.0f64..=1.0) {
        let bandit = TwoArmedBandit::new(p0l, p0r).unwrap();
        let layout = RegisterLayout::new()
            .with("a", 1, RegisterRole::Action).unwrap()
            .with("r", 1, RegisterRole::Reward).unwrap();
        let mut state = StateVector::zero(layout).unwrap();
        bandit_step_circuit(&bandit, left).unwrap().apply(&mut state).unwrap();
        let circuit = state.measure_probabilities(&["a", "r"]).unwrap();
        let mdp = bandit.to_mdp(1, 1.0).unwrap();
        let generic = common::enumerated_trajectories(&mdp, &Policy::bandit(left).unwrap());
        for (x, p) in generic.iter().enumerate() {
            prop_assert!((circuit.probability(x) - p).abs() <= 1e-10);
        }
    }

    // ae

    #[test]
    fn phase_estimation_matches_kernel(theta in 0.0f64..0.5, t in 1usize..=8) {
        let prep = common::flag_preparation((PI * theta).sin().powi(2));
        let q = q_qpe_operator(&prep).unwrap();
        let closed = two_eigenphase_distribution(theta, t);
        let cached = phase_estimation(&prep, &q, t, PowerMethod::Cached).unwrap();
        for (x, p) in closed.iter().enumerate() {
            prop_assert!((cached.probability(x) - p).abs() <= 1e-8);
        }
        if t <= 5 {
            let repeated = phase_estimation(&prep, &q, t, PowerMethod::Repeated).unwrap();
            prop_assert!(repeated.max_abs_diff(&cached) <= 1e-9);
        }
    }

    #[test]
    fn power_paths_agree_on_mdps(seed in any::<u64>(), t in 1usize..=3) {
        let mut rng = rng_for(seed, 7);
        let mdp = common::random_mdp(&mut rng, 2, 2, 2, 1);
        let policy = common::random_policy(&mut rng, &mdp);
        let prep = a_qpe(&mdp, &policy, &ReturnEncoding::auto(&mdp).unwrap()).unwrap();
        let q = q_qpe_operator(&prep).unwrap();
        let repeated = phase_estimation(&prep, &q, t, PowerMethod::Repeated).unwrap();
        let cached = phase_estimation(&prep, &q, t, PowerMethod::Cached).unwrap();
        prop_assert!(repeated.max_abs_diff(&cached) <= 1e-9);
    }

    #[test]
    fn epsilon_dominates_lemma_bound(n in 1usize..=12, mu in 0.0f64..=1.0, lower in -2.0f64..0.0, width in 0.1f64..4.0) {
        let a = PI / (1u64 << (n + 1)) as f64;
        prop_assert!(epsilon_bound(n, lower, lower + width) + 1e-12 >= width * lemma1_bound(mu, a));
    }

    #[test]
    fn decoded_error_is_affine(t in 1usize..=8, v in 0.0f64..=1.0, lower in -2.0f64..1.0, width in 0.1f64..4.0) {
        let config = QpeConfig::with_t_equal_n(t, lower, lower + width).unwrap();
        let value = lower + width * v;
        for x in 0..config.phase_states() {
            let lhs = (decode_value(x, &config).unwrap() - value).abs();
            let rhs = width * ((PI * x as f64 / config.phase_states() as f64).sin().powi(2) - v).abs();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn config_monotonicity(n in 1usize..=20, delta in 0.001f64..0.5) {
        prop_assert!(epsilon_bound(n + 1, 0.0, 1.0) < epsilon_bound(n, 0.0, 1.0));
        let here = QpeConfig::new(n, delta, 0.0, 1.0).unwrap();
        prop_assert!(QpeConfig::new(n + 1, delta, 0.0, 1.0).unwrap().t > here.t);
        prop_assert!(QpeConfig::new(n, delta / 2.0, 0.0, 1.0).unwrap().t >= here.t);
        prop_assert_eq!(here.a_applications(), (1u64 << (here.t + 1)) - 1);
    }

    // qpi

    #[test]
    fn backends_agree(
        p0l in 0.0f64..=1.0,
        p0r in 0.0f64..=1.0,
        policies in 2usize..=4,
        t in 1usize..=3,
        threshold in 0.0f64..1.0,
    ) {
        let mdp = bandit_mdp(p0l, p0r, 1);
        let set = PolicySet::bandit(policies).unwrap();
        let config = QpeConfig::with_t_equal_n(t, 0.0, 1.0).unwrap();
        let structured = build_search_distribution(&mdp, &set, &config).unwrap();
        let literal = statevector_qpi_backend(&mdp, &set, &config).unwrap();
        let p_good = structured.good_probability(threshold);
        for j in 0..=3u64 {
            let a = structured.amplified(threshold, j).unwrap();
            let b = literal.amplified(threshold, j).unwrap();
            prop_assert!(a.max_abs_diff(&b) <= 1e-9);
            let marked = structured.marked(threshold);
            let good = b.mass_where(|o| marked[o & ((1 << t) - 1)]);
            prop_assert!((good - amplified_success(p_good, j)).abs() <= 1e-9);
        }
    }

    #[test]
    fn amplification_preserves_conditional(seed in any::<u64>(), policies in 1usize..=6, t in 1usize..=4, threshold in 0.0f64..1.0, j in 0u64..=8) {
        let mut rng = rng_for(seed, 8);
        let search = random_search(&mut rng, policies, t);
        let marked = search.marked(threshold);
        let is_good = |o: usize| marked[o & ((1 << t) - 1)];
        let before = search.joint().unwrap();
        let after = search.amplified(threshold, j).unwrap();
        let p_before = before.mass_where(is_good);
        let p_after = after.mass_where(is_good);
        prop_assert!((p_after - amplified_success(p_before, j)).abs() <= 1e-9);
        for o in 0..before.len() {
            let (mass_b, mass_a) = if is_good(o) { (p_before, p_after) } else { (1.0 - p_before, 1.0 - p_after) };
            if mass_b > 1e-9 && mass_a > 1e-9 {
                let cb = before.probability(o) / mass_b;
                let ca = after.probability(o) / mass_a;
                prop_assert!((cb - ca).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn policy_iteration_trace_invariants(
        seed in any::<u64>(),
        policies in 1usize..=12,
        t in 2usize..=5,
        patience in 0usize..=8,
        lambda in 1.01f64..3.0,
    ) {
        let mut rng = rng_for(seed, 9);
        let search = random_search(&mut rng, policies, t);
        let start = rng.gen_range(0..policies);
        let cfg = GroverSearchConfig { lambda, patience, ..Default::default() };
        let run = policy_iteration_on(&search, start, &cfg, &mut rng).unwrap();

        let mut value = run.initial_value;
        let mut policy = start;
        for r in &run.records {
            if r.accepted {
                prop_assert!(r.value > value);
                prop_assert_eq!(r.policy, r.candidate_policy);
            } else {
                prop_assert_eq!(r.value, value);
                prop_assert_eq!(r.policy, policy);
            }
            value = r.value;
            policy = r.policy;
        }
        prop_assert_eq!(run.value, value);
        prop_assert_eq!(run.policy, policy);

        let total: u64 = run.records.iter().map(|r| r.rotations).sum();
        prop_assert_eq!(run.total_rotations, total);
        let keep = run.records.len().saturating_sub(patience);
        let non_patience: u64 = run.records[..keep].iter().map(|r| r.rotations).sum();
        prop_assert_eq!(run.non_patience_rotations, non_patience);

        let last_accept = run.records.iter().rposition(|r| r.accepted).map_or(0, |i| i + 1);
        prop_assert!(run.records.len() - last_accept <= patience + 1);
        if run.status == RunStatus::Converged {
            prop_assert_eq!(run.records.len() - last_accept, patience + 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn monte_carlo_mean_converges(p0l in 0.0f64..=1.0, p0r in 0.0f64..=1.0, left in 0.0f64..=1.0, seed in any::<u64>()) {
        let mdp = bandit_mdp(p0l, p0r, 2);
        let policy = Policy::bandit(left).unwrap();
        let truth = exact_value(&mdp, &policy).unwrap();
        let sampler = TrajectorySampler::new(&mdp, &policy).unwrap();
        let samples = 20_000;
        let mean = sampler.mean_return(samples, &mut rng_for(seed, 10));
        // returns lie in [0, 2], so the standard deviation is at most 1
        prop_assert!((mean - truth).abs() <= 3.0 / (samples as f64).sqrt() + 1e-12);
    }

    #[test]
    fn monte_carlo_error_scales_as_inverse_root(p0 in 0.2f64..0.8, seed in any::<u64>()) {
        let mdp = bandit_mdp(p0, p0, 1);
        let policy = Policy::bandit(0.5).unwrap();
        let truth = exact_value(&mdp, &policy).unwrap();
        let sampler = TrajectorySampler::new(&mdp, &policy).unwrap();
        let mut rng = rng_for(seed, 11);
        let mut median_err = |n: usize| {
            let errs: Vec<f64> = (0..801).map(|_| (sampler.mean_return(n, &mut rng) - truth).abs()).collect();
            median(&errs)
        };
        let ratio = median_err(100) / median_err(400);
        prop_assert!((ratio - 2.0).abs() <= 0.6, "ratio {}", ratio);
    }
}

#[test]
fn controlled_not_follows_case_split() {
    let gate = Gate::new(GateOp::Dense(pauli_x()), vec![1], vec![Control::on(0)]).unwrap();
    let layout = RegisterLayout::new()
        .with("q", 2, RegisterRole::State)
        .unwrap();
    for basis in 0..4usize {
        let mut s = StateVector::basis(layout.clone(), basis).unwrap();
        s.apply(&gate).unwrap();
        let control = basis >> 1;
        let expected = if control == 1 { basis ^ 1 } else { basis };
        assert!((s.amplitudes()[expected].norm_sqr() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn worked_configuration_example() {
    let c = config_for(0.025, 0.05, 0.0, 2.0).unwrap();
    assert_eq!((c.n, c.t, c.a_applications()), (7, 11, 4095));
}
