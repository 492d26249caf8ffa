//! WebAssembly bindings for the browser demo. Every export returns a JSON
//! string so the page can plot it without extra glue.

use qpi_core::ae::{config_for, QpeEvaluator};
use qpi_core::qmdp::{exact_value, Mdp, Policy, ReturnEncoding, TwoArmedBandit};
use qpi_core::qpi::{
    amplified_success, build_search_distribution, policy_iteration_on, GroverSearchConfig,
    PolicySet,
};
use qpi_core::seed::rng_for;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest policy set the page may request.
const MAX_POLICIES: usize = 1024;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn bandit(p0_left: f64, p0_right: f64, horizon: usize) -> Result<Mdp, JsValue> {
    TwoArmedBandit::new(p0_left, p0_right)
        .and_then(|b| b.to_mdp(horizon, 1.0))
        .map_err(js_err)
}

fn toy_search(policies: usize) -> Result<(Mdp, PolicySet, qpi_core::ae::QpeConfig), JsValue> {
    if policies > MAX_POLICIES {
        return Err(js_err(format!("at most {MAX_POLICIES} policies")));
    }
    let mdp = bandit(1.0, 0.0, 1)?;
    let set = PolicySet::bandit(policies).map_err(js_err)?;
    let config = config_for(0.0125, 0.07, 0.0, 1.0).map_err(js_err)?;
    Ok((mdp, set, config))
}

#[wasm_bindgen]
pub fn version() -> String {
    qpi_core::experiments::VERSION.to_string()
}

/// Phase-estimation outcome distribution for one bandit policy.
#[wasm_bindgen]
pub fn qpe_distribution(
    p0_left: f64,
    p0_right: f64,
    policy_left: f64,
    horizon: usize,
    epsilon: f64,
    delta: f64,
) -> Result<String, JsValue> {
    if !(1..=3).contains(&horizon) {
        return Err(js_err("horizon must be 1, 2 or 3"));
    }
    let mdp = bandit(p0_left, p0_right, horizon)?;
    let policy = Policy::bandit(policy_left).map_err(js_err)?;
    let truth = exact_value(&mdp, &policy).map_err(js_err)?;
    let enc = ReturnEncoding::auto(&mdp).map_err(js_err)?;
    let config = config_for(epsilon, delta, enc.lower, enc.upper).map_err(js_err)?;
    if config.t > 14 {
        return Err(js_err(format!(
            "t = {} is too large for the page",
            config.t
        )));
    }
    let eval = QpeEvaluator::new(&mdp, &policy, &config).map_err(js_err)?;
    let probs = eval.distribution().probabilities();
    let values: Vec<f64> = (0..probs.len())
        .map(|x| config.decode(x))
        .collect::<Result<_, _>>()
        .map_err(js_err)?;
    Ok(json!({
        "truth": truth,
        "n": config.n,
        "t": config.t,
        "epsilon": config.epsilon,
        "in_epsilon_mass": eval.mass_within(truth, config.epsilon),
        "values": values,
        "probabilities": probs,
    })
    .to_string())
}

/// Probability of measuring an improving policy after `j = 0..=max_rotations`
/// Grover rotations on the deterministic bandit, for a threshold value.
#[wasm_bindgen]
pub fn amplification_curve(
    policies: usize,
    threshold: f64,
    max_rotations: u32,
) -> Result<String, JsValue> {
    let (mdp, set, config) = toy_search(policies)?;
    let search = build_search_distribution(&mdp, &set, &config).map_err(js_err)?;
    let p_good = search.good_probability(threshold);
    let marked = search.marked(threshold);
    let mask = config.phase_states() - 1;
    let mut measured = Vec::with_capacity(max_rotations as usize + 1);
    for j in 0..=u64::from(max_rotations) {
        let dist = search.amplified(threshold, j).map_err(js_err)?;
        measured.push(dist.mass_where(|o| marked[o & mask]));
    }
    let predicted: Vec<f64> = (0..=u64::from(max_rotations))
        .map(|j| amplified_success(p_good, j))
        .collect();
    Ok(json!({
        "p_good": p_good,
        "measured": measured,
        "predicted": predicted,
    })
    .to_string())
}

/// One run of quantum policy iteration from the worst policy.
#[wasm_bindgen]
pub fn qpi_trace(
    policies: usize,
    patience: usize,
    lambda: f64,
    seed: u64,
) -> Result<String, JsValue> {
    let (mdp, set, config) = toy_search(policies)?;
    let search = build_search_distribution(&mdp, &set, &config).map_err(js_err)?;
    let cfg = GroverSearchConfig {
        lambda,
        patience,
        ..Default::default()
    };
    // π(←) = 1 always loses
    let start = set.len() - 1;
    let run = policy_iteration_on(&search, start, &cfg, &mut rng_for(seed, 0)).map_err(js_err)?;
    let true_value = exact_value(&mdp, &set.policies()[run.policy]).map_err(js_err)?;
    Ok(json!({
        "run": run,
        "true_value": true_value,
        "n": config.n,
        "t": config.t,
    })
    .to_string())
}
