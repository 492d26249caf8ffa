use rand::Rng;
use serde::Serialize;

use crate::ae::{decode_value, QpeConfig, QpeEvaluator};
use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::qmdp::{bits_for, Mdp, Policy, ReturnEncoding};

/// Ordered, explicitly enumerated set of candidate policies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicySet {
    policies: Vec<Policy>,
}

impl PolicySet {
    pub fn new(policies: Vec<Policy>) -> Result<Self> {
        if policies.is_empty() {
            return Err(Error::Config("policy set is empty".into()));
        }
        Ok(Self { policies })
    }

    /// `π^n(←) = (n − 1)/(N − 1)` for `n = 1, …, N`; index `n − 1`.
    pub fn bandit(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::Config(format!(
                "bandit policy set needs N ≥ 2, got {size}"
            )));
        }
        let last = (size - 1) as f64;
        Self::new(
            (0..size)
                .map(|i| Policy::bandit(i as f64 / last))
                .collect::<Result<_>>()?,
        )
    }

    pub fn len(&self) -> usize {
        self.policies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.policies.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Policy> {
        self.policies.get(index)
    }

    pub fn policies(&self) -> &[Policy] {
        &self.policies
    }

    /// Qubits of the policy register.
    pub fn register_bits(&self) -> usize {
        bits_for(self.len())
    }
}

/// Joint distribution `P(π, x) = P_π(x)/|P|` of the measured policy and
/// phase registers after `A_QPI`.
///
/// Stored per outcome `x` so that conditional sampling of `π` given `x` is a
/// contiguous scan.
#[derive(Clone, Debug)]
pub struct SearchDistribution {
    config: QpeConfig,
    num_policies: usize,
    // by_outcome[x * num_policies + π] = P_π(x)
    by_outcome: Vec<f64>,
    // marginal[x] = Σ_π P_π(x) / |P|
    marginal: Vec<f64>,
}

impl SearchDistribution {
    /// Builds from per-policy phase-estimation distributions.
    pub fn from_distributions(
        config: &QpeConfig,
        per_policy: &[OutcomeDistribution],
    ) -> Result<Self> {
        let states = config.phase_states();
        if per_policy.is_empty() {
            return Err(Error::Config("policy set is empty".into()));
        }
        if let Some(d) = per_policy.iter().find(|d| d.len() != states) {
            return Err(Error::DimensionMismatch {
                expected: states,
                found: d.len(),
            });
        }
        let n = per_policy.len();
        let mut by_outcome = vec![0.0; states * n];
        let mut marginal = vec![0.0; states];
        for (pi, d) in per_policy.iter().enumerate() {
            for (x, &p) in d.probabilities().iter().enumerate() {
                by_outcome[x * n + pi] = p;
                marginal[x] += p / n as f64;
            }
        }
        Ok(Self {
            config: *config,
            num_policies: n,
            by_outcome,
            marginal,
        })
    }

    pub fn config(&self) -> &QpeConfig {
        &self.config
    }

    pub fn num_policies(&self) -> usize {
        self.num_policies
    }

    /// `P(π, x)`.
    pub fn probability(&self, policy: usize, x: usize) -> f64 {
        self.by_outcome[x * self.num_policies + policy] / self.num_policies as f64
    }

    /// Phase-estimation outcome distribution of a single policy.
    pub fn policy_distribution(&self, policy: usize) -> Result<OutcomeDistribution> {
        let probs = (0..self.config.phase_states())
            .map(|x| self.by_outcome[x * self.num_policies + policy])
            .collect();
        OutcomeDistribution::new(self.config.t, probs)
    }

    /// Marginal over `x`.
    pub fn outcome_marginal(&self) -> &[f64] {
        &self.marginal
    }

    /// Decoded value of outcome `x`.
    pub fn decode(&self, x: usize) -> f64 {
        decode_value(x, &self.config).expect("outcome in range")
    }

    /// Which outcomes the threshold oracle marks (`decode(x) > threshold`).
    pub fn marked(&self, threshold: f64) -> Vec<bool> {
        (0..self.config.phase_states())
            .map(|x| self.decode(x) > threshold)
            .collect()
    }

    /// Total probability of marked `(π, x)` pairs.
    pub fn good_probability(&self, threshold: f64) -> f64 {
        self.marked(threshold)
            .iter()
            .zip(&self.marginal)
            .filter(|(m, _)| **m)
            .map(|(_, p)| p)
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// Exact joint distribution after `rotations` Grover iterations with the
    /// given threshold, as an outcome over `policy register ⊗ phase register`.
    pub fn amplified(&self, threshold: f64, rotations: u64) -> Result<OutcomeDistribution> {
        let marked = self.marked(threshold);
        let p_good = self.good_probability(threshold);
        let success = amplified_success(p_good, rotations);
        let (good_scale, bad_scale) = class_scales(p_good, success);
        let pol_bits = bits_for(self.num_policies);
        let t = self.config.t;
        let mut probs = vec![0.0; 1 << (pol_bits + t)];
        for x in 0..self.config.phase_states() {
            let scale = if marked[x] { good_scale } else { bad_scale };
            for pi in 0..self.num_policies {
                probs[(pi << t) | x] = self.probability(pi, x) * scale;
            }
        }
        OutcomeDistribution::new(pol_bits + t, probs)
    }

    /// The unamplified joint distribution.
    pub fn joint(&self) -> Result<OutcomeDistribution> {
        self.amplified(f64::INFINITY, 0)
    }
}

/// `sin²((2j + 1)·asin √p_good)`.
pub fn amplified_success(p_good: f64, rotations: u64) -> f64 {
    let theta = p_good.clamp(0.0, 1.0).sqrt().asin();
    ((2 * rotations + 1) as f64 * theta).sin().powi(2)
}

// Factors mapping unamplified to amplified probabilities within each class.
fn class_scales(p_good: f64, success: f64) -> (f64, f64) {
    let good = if p_good > 0.0 { success / p_good } else { 0.0 };
    let bad = if p_good < 1.0 {
        (1.0 - success) / (1.0 - p_good)
    } else {
        0.0
    };
    (good, bad)
}

/// Per-policy phase-estimation distributions, then the joint search
/// distribution. Policies are evaluated in parallel when the `parallel`
/// feature is on; the result does not depend on evaluation order.
pub fn build_search_distribution(
    mdp: &Mdp,
    policies: &PolicySet,
    config: &QpeConfig,
) -> Result<SearchDistribution> {
    let encoding = ReturnEncoding::auto(mdp)?.with_bounds(config.lower, config.upper)?;
    let eval = |p: &Policy| {
        QpeEvaluator::with_encoding(mdp, p, &encoding, config).map(|e| e.distribution().clone())
    };
    #[cfg(feature = "parallel")]
    let per_policy: Result<Vec<_>> = {
        use rayon::prelude::*;
        policies.policies().par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_policy: Result<Vec<_>> = policies.policies().iter().map(eval).collect();
    SearchDistribution::from_distributions(config, &per_policy?)
}

/// One measurement after `rotations` Grover iterations with oracle threshold
/// `threshold`: returns `(policy index, phase outcome x)`.
///
/// Amplification only rescales the good and bad classes, so the class is
/// drawn with probability `sin²((2j + 1)θ_a)` and the pair is then drawn from
/// the unamplified distribution conditioned on that class.
pub fn grover_amplified_sample<R: Rng + ?Sized>(
    dist: &SearchDistribution,
    threshold: f64,
    rotations: u64,
    rng: &mut R,
) -> (usize, usize) {
    let marked = dist.marked(threshold);
    let p_good = dist.good_probability(threshold);
    let good = if p_good <= 0.0 {
        false
    } else if p_good >= 1.0 {
        true
    } else {
        rng.gen::<f64>() < amplified_success(p_good, rotations)
    };
    let class_mass: f64 = marked
        .iter()
        .zip(&dist.marginal)
        .filter(|(m, _)| **m == good)
        .map(|(_, p)| p)
        .sum();
    let x = pick(
        marked
            .iter()
            .zip(&dist.marginal)
            .map(|(m, p)| if *m == good { *p } else { 0.0 }),
        class_mass,
        rng,
    );
    let n = dist.num_policies;
    let column = &dist.by_outcome[x * n..(x + 1) * n];
    let pi = pick(column.iter().copied(), column.iter().sum(), rng);
    (pi, x)
}

// Inverse-CDF draw from unnormalised weights with known total.
fn pick<R: Rng + ?Sized>(
    weights: impl Iterator<Item = f64> + Clone,
    total: f64,
    rng: &mut R,
) -> usize {
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmdp::TwoArmedBandit;
    use crate::seed::rng_for;

    fn small() -> SearchDistribution {
        let mdp = TwoArmedBandit::new(0.55, 0.65)
            .unwrap()
            .to_mdp(1, 1.0)
            .unwrap();
        let config = QpeConfig::with_t_equal_n(3, 0.0, 1.0).unwrap();
        build_search_distribution(&mdp, &PolicySet::bandit(4).unwrap(), &config).unwrap()
    }

    #[test]
    fn bandit_policy_set() {
        let set = PolicySet::bandit(5).unwrap();
        assert_eq!(set.len(), 5);
        assert_eq!(set.get(0).unwrap().prob(0, 0), 0.0);
        assert_eq!(set.get(2).unwrap().prob(0, 0), 0.5);
        assert_eq!(set.get(4).unwrap().prob(0, 0), 1.0);
        assert_eq!(set.register_bits(), 3);
        assert!(PolicySet::bandit(1).is_err());
    }

    #[test]
    fn joint_is_normalised_and_marginals_match() {
        let d = small();
        let joint = d.joint().unwrap();
        assert!((joint.total() - 1.0).abs() < 1e-9);
        for pi in 0..4 {
            let row: f64 = (0..8).map(|x| d.probability(pi, x)).sum();
            assert!((row - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_policies_reduce_to_single() {
        let mdp = TwoArmedBandit::new(0.55, 0.65)
            .unwrap()
            .to_mdp(1, 1.0)
            .unwrap();
        let config = QpeConfig::with_t_equal_n(3, 0.0, 1.0).unwrap();
        let p = Policy::bandit(0.5).unwrap();
        let single =
            build_search_distribution(&mdp, &PolicySet::new(vec![p.clone()]).unwrap(), &config)
                .unwrap();
        let double =
            build_search_distribution(&mdp, &PolicySet::new(vec![p.clone(), p]).unwrap(), &config)
                .unwrap();
        for x in 0..8 {
            assert!((single.outcome_marginal()[x] - double.outcome_marginal()[x]).abs() < 1e-15);
            assert!((double.probability(0, x) - double.probability(1, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_rotations_is_unamplified() {
        let d = small();
        let a = d.amplified(0.3, 0).unwrap();
        assert!(a.max_abs_diff(&d.joint().unwrap()) < 1e-15);
    }

    #[test]
    fn full_rotation() {
        // p_good = 1/4: θ = π/6 and one rotation reaches π/2
        assert!((amplified_success(0.25, 1) - 1.0).abs() < 1e-15);
        assert!((amplified_success(0.5, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_good_mass() {
        let d = small();
        let mut rng = rng_for(3, 0);
        for j in 0..4 {
            let (_, x) = grover_amplified_sample(&d, 1.0, j, &mut rng);
            assert!(d.decode(x) <= 1.0);
            let (_, x) = grover_amplified_sample(&d, -1.0, j, &mut rng);
            assert!(d.decode(x) > -1.0);
        }
    }

    #[test]
    fn sample_frequencies_follow_amplified_distribution() {
        let d = small();
        let threshold = 0.5;
        let exact = d.amplified(threshold, 2).unwrap();
        let mut rng = rng_for(9, 0);
        let mut counts = vec![0usize; exact.len()];
        let shots = 40_000;
        for _ in 0..shots {
            let (pi, x) = grover_amplified_sample(&d, threshold, 2, &mut rng);
            counts[(pi << 3) | x] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let p = exact.probability(i);
            let se = (p * (1.0 - p) / shots as f64).sqrt();
            assert!(
                (c as f64 / shots as f64 - p).abs() <= 5.0 * se + 1e-3,
                "outcome {i}"
            );
        }
    }
}
