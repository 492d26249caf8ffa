use serde::{Deserialize, Serialize};

use super::mdp::Mdp;
use crate::error::{Error, Result};

const EXACT_TOL: f64 = 1e-9;
const MAX_REWARD_STRINGS: u128 = 1 << 22;

/// Fixed-point layout of the return register plus the bounds `g < ḡ`
/// used by the value encoding `φ(x) = (x − g)/(ḡ − g)`.
///
/// Values are stored as `trunc(x · 2^fractional_bits)`; with `signed` the
/// code is two's complement and `integer_bits` includes the sign bit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReturnEncoding {
    pub integer_bits: usize,
    pub fractional_bits: usize,
    #[serde(default)]
    pub signed: bool,
    pub lower: f64,
    pub upper: f64,
}

impl ReturnEncoding {
    pub fn new(
        integer_bits: usize,
        fractional_bits: usize,
        signed: bool,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        let enc = Self {
            integer_bits,
            fractional_bits,
            signed,
            lower,
            upper,
        };
        enc.validate()?;
        Ok(enc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite()) || self.upper <= self.lower {
            return Err(Error::Config(format!(
                "return bounds need g < ḡ, got g = {}, ḡ = {}",
                self.lower, self.upper
            )));
        }
        let w = self.width();
        if w == 0 || w > 24 {
            return Err(Error::Config(format!(
                "return register width {w} outside 1..=24"
            )));
        }
        Ok(())
    }

    /// Smallest encoding that holds every return of `mdp` with the given
    /// fractional precision; bounds are the extreme discounted reward sums.
    pub fn for_mdp(mdp: &Mdp, fractional_bits: usize) -> Result<Self> {
        let scale = (fractional_bits as f64).exp2();
        for &r in mdp.rewards() {
            if ((r * scale) - (r * scale).round()).abs() > EXACT_TOL {
                return Err(Error::EncodingOverflow(format!(
                    "reward {r} is not representable with {fractional_bits} fractional bits"
                )));
            }
        }
        let weight_sum: f64 = (0..mdp.horizon())
            .map(|h| mdp.discount().powi(h as i32))
            .sum();
        let r_min = mdp.rewards().iter().copied().fold(f64::INFINITY, f64::min);
        let r_max = mdp
            .rewards()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut lower = r_min * weight_sum;
        let mut upper = r_max * weight_sum;

        let mut code_min = i64::MAX;
        let mut code_max = i64::MIN;
        for_each_reward_string(mdp, |ret| {
            let code = (ret * scale).trunc() as i64;
            code_min = code_min.min(code);
            code_max = code_max.max(code);
        })?;
        lower = lower.min(code_min as f64 / scale);
        upper = upper.max(code_max as f64 / scale);
        if upper <= lower {
            // constant returns: any nondegenerate interval works
            upper = lower + 1.0;
        }
        let signed = code_min < 0;
        let width = if signed {
            let need = code_max.max(-code_min - 1).max(0) as u64;
            (u64::BITS - need.leading_zeros()) as usize + 1
        } else {
            ((u64::BITS - (code_max as u64).leading_zeros()) as usize).max(1)
        };
        let integer_bits = width
            .saturating_sub(fractional_bits)
            .max(usize::from(fractional_bits == 0));
        Self::new(integer_bits, fractional_bits, signed, lower, upper)
    }

    /// Like [`for_mdp`](Self::for_mdp) with the fewest fractional bits (at most
    /// 8) that represent every return exactly; past 8 bits returns are truncated.
    pub fn auto(mdp: &Mdp) -> Result<Self> {
        let mut last_err = None;
        for f in 0..=8 {
            match Self::for_mdp(mdp, f) {
                Ok(enc) if enc.truncation_error(mdp)? == 0.0 || f == 8 => return Ok(enc),
                Ok(_) => {}
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::EncodingOverflow("no exact encoding".into())))
    }

    /// The same register layout with different value bounds.
    pub fn with_bounds(&self, lower: f64, upper: f64) -> Result<Self> {
        Self::new(
            self.integer_bits,
            self.fractional_bits,
            self.signed,
            lower,
            upper,
        )
    }

    /// Total register width in qubits.
    pub fn width(&self) -> usize {
        self.integer_bits + self.fractional_bits
    }

    /// Register code for `x`, truncated toward zero at the fractional width.
    pub fn encode(&self, x: f64) -> Result<u64> {
        let code = (x * (self.fractional_bits as f64).exp2()).trunc();
        let w = self.width() as i32;
        let (lo, hi) = if self.signed {
            (-(2f64.powi(w - 1)), 2f64.powi(w - 1) - 1.0)
        } else {
            (0.0, 2f64.powi(w) - 1.0)
        };
        if !(lo..=hi).contains(&code) {
            return Err(Error::EncodingOverflow(format!(
                "return {x} does not fit a {w}-bit register"
            )));
        }
        let code = code as i64;
        Ok((code as u64) & ((1u64 << w) - 1))
    }

    /// Real value held by register code `code`.
    pub fn decode(&self, code: u64) -> f64 {
        let w = self.width();
        let raw = if self.signed && code >> (w - 1) & 1 == 1 {
            code as i64 - (1i64 << w)
        } else {
            code as i64
        };
        raw as f64 / (self.fractional_bits as f64).exp2()
    }

    /// `φ(x) = (x − g)/(ḡ − g)`.
    pub fn phi(&self, x: f64) -> f64 {
        (x - self.lower) / (self.upper - self.lower)
    }

    /// `φ⁻¹(p) = g + (ḡ − g)·p`.
    pub fn phi_inverse(&self, p: f64) -> f64 {
        self.lower + (self.upper - self.lower) * p
    }

    /// Largest `|G − decode(encode(G))|` over all reward strings of `mdp`.
    pub fn truncation_error(&self, mdp: &Mdp) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let mut failure = None;
        for_each_reward_string(mdp, |ret| match self.encode(ret) {
            Ok(code) => worst = worst.max((ret - self.decode(code)).abs()),
            Err(e) => failure = Some(e),
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(worst),
        }
    }
}

/// Calls `visit(return)` for every string of H reward values.
pub fn for_each_reward_string(mdp: &Mdp, mut visit: impl FnMut(f64)) -> Result<()> {
    let per_step = mdp.num_rewards() as u128;
    let requested = per_step.saturating_pow(mdp.horizon() as u32);
    if requested > MAX_REWARD_STRINGS {
        return Err(Error::EnumerationBudget {
            requested,
            budget: MAX_REWARD_STRINGS,
        });
    }
    let mut idx = vec![0usize; mdp.horizon()];
    loop {
        visit(reward_string_return(mdp, &idx));
        let mut h = idx.len();
        loop {
            if h == 0 {
                return Ok(());
            }
            h -= 1;
            idx[h] += 1;
            if idx[h] < mdp.num_rewards() {
                break;
            }
            idx[h] = 0;
        }
    }
}

/// `Σ γ^{h−1} r_h` for reward indices `idx`.
pub fn reward_string_return(mdp: &Mdp, idx: &[usize]) -> f64 {
    let mut weight = 1.0;
    let mut total = 0.0;
    for &r in idx {
        total += weight * mdp.rewards()[r];
        weight *= mdp.discount();
    }
    total
}
