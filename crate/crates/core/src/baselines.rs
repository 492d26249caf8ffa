//! Classical Monte-Carlo policy evaluation and the matched QPE-vs-MC
//! comparison.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::Serialize;

use crate::ae::{epsilon_bound, QpeConfig, QpeEvaluator};
use crate::error::{Error, Result};
use crate::qmdp::{exact_value, Mdp, Policy, ReturnEncoding};
use crate::seed::{rng_for, stream_id};
use crate::stats::median;

/// Stream tags for the comparison's QPE and MC trials.
const QPE_STREAM: u8 = 0x41;
const MC_STREAM: u8 = 0x42;

/// Default trial count of [`matched_comparison`]; odd so the median is an observed value.
pub const DEFAULT_TRIALS: usize = 201;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub sample_count: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn new(sample_count: usize, seed: u64) -> Result<Self> {
        if sample_count == 0 {
            return Err(Error::Config(
                "Monte-Carlo needs at least one sample".into(),
            ));
        }
        Ok(Self { sample_count, seed })
    }
}

/// Forward simulator of `mdp` under `policy` with precomputed samplers.
#[derive(Clone, Debug)]
pub struct TrajectorySampler<'a> {
    mdp: &'a Mdp,
    actions: Vec<WeightedIndex<f64>>,
    // outcomes[s * A + a] over r * S + s'
    outcomes: Vec<WeightedIndex<f64>>,
}

impl<'a> TrajectorySampler<'a> {
    pub fn new(mdp: &'a Mdp, policy: &Policy) -> Result<Self> {
        policy.check_against(mdp)?;
        let invalid = |e| Error::InvalidDistribution(format!("{e}"));
        let actions = policy
            .table()
            .iter()
            .map(|row| WeightedIndex::new(row).map_err(invalid))
            .collect::<Result<_>>()?;
        let (ns, nr) = (mdp.num_states(), mdp.num_rewards());
        let mut outcomes = Vec::with_capacity(ns * mdp.num_actions());
        for s in 0..ns {
            for a in 0..mdp.num_actions() {
                let weights: Vec<f64> = (0..nr * ns)
                    .map(|i| mdp.prob(s, a, i / ns, i % ns))
                    .collect();
                outcomes.push(WeightedIndex::new(weights).map_err(invalid)?);
            }
        }
        Ok(Self {
            mdp,
            actions,
            outcomes,
        })
    }

    /// Discounted return of one simulated trajectory from the start state.
    pub fn sample_return<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mdp = self.mdp;
        let (ns, na) = (mdp.num_states(), mdp.num_actions());
        let mut s = mdp.initial_state();
        let mut weight = 1.0;
        let mut total = 0.0;
        for _ in 0..mdp.horizon() {
            let a = self.actions[s].sample(rng);
            let o = self.outcomes[s * na + a].sample(rng);
            total += weight * mdp.rewards()[o / ns];
            weight *= mdp.discount();
            s = o % ns;
        }
        total
    }

    /// Mean of `samples` simulated returns.
    pub fn mean_return<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> f64 {
        (0..samples).map(|_| self.sample_return(rng)).sum::<f64>() / samples as f64
    }
}

/// Monte-Carlo value estimate from `sample_count` simulated trajectories.
pub fn mc_evaluate(mdp: &Mdp, policy: &Policy, config: &McConfig) -> Result<f64> {
    let mut rng = rng_for(config.seed, 0);
    Ok(TrajectorySampler::new(mdp, policy)?.mean_return(config.sample_count, &mut rng))
}

/// One row of the QPE-vs-MC comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    /// `2^{n+1} − 1`, spent by both methods.
    pub qsamples: u64,
    pub qpe_median_err: f64,
    pub mc_median_err: f64,
    pub epsilon_bound: f64,
}

/// For each `n`, `trials` runs of phase estimation with `t = n` and of
/// Monte-Carlo with `2^{n+1} − 1` samples; reports median absolute errors
/// against the exact value.
pub fn matched_comparison(
    mdp: &Mdp,
    policy: &Policy,
    n_range: &[usize],
    trials: usize,
    root_seed: u64,
) -> Result<Vec<ComparisonRow>> {
    if trials == 0 {
        return Err(Error::Config("trials must be positive".into()));
    }
    let truth = exact_value(mdp, policy)?;
    let encoding = ReturnEncoding::auto(mdp)?;
    let sampler = TrajectorySampler::new(mdp, policy)?;
    n_range
        .iter()
        .map(|&n| {
            if n == 0 || n > 24 {
                return Err(Error::Config(format!("n = {n} outside 1..=24")));
            }
            let config = QpeConfig::with_t_equal_n(n, encoding.lower, encoding.upper)?;
            let eval = QpeEvaluator::with_encoding(mdp, policy, &encoding, &config)?;
            let qsamples = config.a_applications();
            let group = n as u32;
            let qpe_errors = crate::par::map_range(trials, |i| {
                let mut rng = rng_for(root_seed, stream_id(QPE_STREAM, group, i as u32));
                (eval.sample(&mut rng).value - truth).abs()
            });
            let mc_errors = crate::par::map_range(trials, |i| {
                let mut rng = rng_for(root_seed, stream_id(MC_STREAM, group, i as u32));
                (sampler.mean_return(qsamples as usize, &mut rng) - truth).abs()
            });
            Ok(ComparisonRow {
                n,
                qsamples,
                qpe_median_err: median(&qpe_errors),
                mc_median_err: median(&mc_errors),
                epsilon_bound: epsilon_bound(n, encoding.lower, encoding.upper),
            })
        })
        .collect()
}
