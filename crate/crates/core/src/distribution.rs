use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact probability map over the basis values of a measured register group.
///
/// Outcomes are integers in `[0, 2^bits)`, read big-endian across the
/// measured registers in the order they were named.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    bits: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(bits: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << bits {
            return Err(Error::InvalidDistribution(format!(
                "{} entries for {bits} bits",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < -1e-12) {
            return Err(Error::InvalidDistribution(format!("entry {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("total mass {total}")));
        }
        Ok(Self {
            bits,
            probs: probs.into_iter().map(|p| p.max(0.0)).collect(),
        })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probability(&self, outcome: usize) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Total mass of outcomes satisfying `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(usize) -> bool) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(x, _)| pred(*x))
            .map(|(_, p)| p)
            .sum()
    }

    /// Draws one outcome.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sampler().sample(rng)
    }

    /// Reusable sampler for drawing many outcomes.
    pub fn sampler(&self) -> WeightedIndex<f64> {
        WeightedIndex::new(&self.probs).expect("distribution has positive mass")
    }

    /// Marginal over the leading `keep_bits` bits of each outcome.
    pub fn marginal_high(&self, keep_bits: usize) -> Result<Self> {
        if keep_bits > self.bits {
            return Err(Error::InvalidDistribution(format!(
                "cannot keep {keep_bits} of {} bits",
                self.bits
            )));
        }
        let shift = self.bits - keep_bits;
        let mut probs = vec![0.0; 1 << keep_bits];
        for (x, p) in self.probs.iter().enumerate() {
            probs[x >> shift] += p;
        }
        Self::new(keep_bits, probs)
    }

    /// Largest absolute per-outcome difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.bits, other.bits, "distribution width mismatch");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_unnormalized_input() {
        assert!(OutcomeDistribution::new(1, vec![0.5, 0.4]).is_err());
        assert!(OutcomeDistribution::new(1, vec![1.0]).is_err());
    }

    #[test]
    fn marginal_of_joint_distribution() {
        let d = OutcomeDistribution::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let m = d.marginal_high(1).unwrap();
        assert!((m.probability(0) - 0.3).abs() < 1e-15);
        assert!((m.probability(1) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_for_a_seed() {
        let d = OutcomeDistribution::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| d.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
    }
}
