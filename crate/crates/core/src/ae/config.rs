use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Phase-estimation precision and the value range being estimated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QpeConfig {
    /// Precision bits.
    pub n: usize,
    /// Failure probability.
    pub delta: f64,
    /// Phase-register qubits.
    pub t: usize,
    /// Lower return bound `g`.
    pub lower: f64,
    /// Upper return bound `ḡ`.
    pub upper: f64,
    /// Guaranteed error of the decoded value (holds with probability `1 − δ`,
    /// or `8/π²` when `t = n`).
    pub epsilon: f64,
}

/// `⌈log2(1/(2δ) + 1/2)⌉`, the qubits added on top of `n`.
pub fn extra_qubits(delta: f64) -> usize {
    (1.0 / (2.0 * delta) + 0.5).log2().ceil().max(0.0) as usize
}

/// `(ḡ − g)(π/2^{n+1} + π²/2^{2n+2})`.
pub fn epsilon_bound(n: usize, lower: f64, upper: f64) -> f64 {
    let a = PI / ((n + 1) as f64).exp2();
    (upper - lower) * (a + a * a)
}

fn check_bounds(lower: f64, upper: f64) -> Result<()> {
    if !(lower.is_finite() && upper.is_finite()) || upper <= lower {
        return Err(Error::Config(format!(
            "value bounds need g < ḡ, got g = {lower}, ḡ = {upper}"
        )));
    }
    Ok(())
}

impl QpeConfig {
    /// Configuration with `t = n + ⌈log2(1/(2δ) + 1/2)⌉`. `δ` is clamped to
    /// `(0, 1]` and `n` to at least 1.
    pub fn new(n: usize, delta: f64, lower: f64, upper: f64) -> Result<Self> {
        check_bounds(lower, upper)?;
        if !(delta > 0.0) {
            return Err(Error::Config(format!("δ = {delta} must be positive")));
        }
        let delta = delta.min(1.0);
        let n = n.max(1);
        Ok(Self {
            n,
            delta,
            t: n + extra_qubits(delta),
            lower,
            upper,
            epsilon: epsilon_bound(n, lower, upper),
        })
    }

    /// Configuration with `t = n`; the error bound then holds with
    /// probability at least `8/π²` instead of `1 − δ`.
    pub fn with_t_equal_n(n: usize, lower: f64, upper: f64) -> Result<Self> {
        check_bounds(lower, upper)?;
        let n = n.max(1);
        Ok(Self {
            n,
            delta: 1.0 - 8.0 / (PI * PI),
            t: n,
            lower,
            upper,
            epsilon: epsilon_bound(n, lower, upper),
        })
    }

    /// Explicit `t`, keeping the error bound of `n`.
    pub fn with_t(mut self, t: usize) -> Result<Self> {
        if t < self.n {
            return Err(Error::Config(format!("t = {t} is below n = {}", self.n)));
        }
        self.t = t;
        Ok(self)
    }

    pub fn phase_states(&self) -> usize {
        1usize << self.t
    }

    /// Applications of `A` or `A†`: `2^{t+1} − 1`.
    pub fn a_applications(&self) -> u64 {
        (1u64 << (self.t + 1)) - 1
    }

    /// Decoded value `g + (ḡ − g)·sin²(πx/2^t)`.
    pub fn decode(&self, x: usize) -> Result<f64> {
        decode_value(x, self)
    }
}

/// Smallest `n ≥ 1` whose error bound meets `epsilon_target`, with `t` from `δ`.
pub fn config_for(epsilon_target: f64, delta: f64, lower: f64, upper: f64) -> Result<QpeConfig> {
    check_bounds(lower, upper)?;
    if !(epsilon_target > 0.0) {
        return Err(Error::Config(format!(
            "ε = {epsilon_target} must be positive"
        )));
    }
    let n = (1..=52)
        .find(|&n| epsilon_bound(n, lower, upper) <= epsilon_target)
        .ok_or_else(|| Error::Config(format!("ε = {epsilon_target} is unreachable")))?;
    QpeConfig::new(n, delta, lower, upper)
}

/// `φ⁻¹(sin²(πx/2^t))`, evaluated on `min(x, 2^t − x)` so that the two
/// outcomes sharing a decoded value compare exactly equal.
pub fn decode_value(x: usize, config: &QpeConfig) -> Result<f64> {
    let states = config.phase_states();
    if x >= states {
        return Err(Error::OutcomeOutOfRange {
            outcome: x,
            bits: config.t,
        });
    }
    let folded = x.min(states - x);
    let s = (PI * folded as f64 / states as f64).sin();
    Ok(config.lower + (config.upper - config.lower) * s * s)
}
