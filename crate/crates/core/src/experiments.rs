//! Reproducible experiment drivers.
//!
//! Each driver takes an [`ExperimentConfig`], runs deterministically from its
//! root seed, and returns a table plus a JSON summary. [`ExperimentOutput::to_csv`]
//! renders the table with a `#` comment block echoing the configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ae::{config_for, QpeConfig, QpeEvaluator};
use crate::baselines::{matched_comparison, DEFAULT_TRIALS};
use crate::error::{Error, Result};
use crate::qmdp::{exact_value, Mdp, Policy, ReturnEncoding, TwoArmedBandit};
use crate::qpi::{
    build_search_distribution, policy_iteration_on, GroverSearchConfig, PolicySet, QpiRun,
    RunStatus,
};
use crate::seed::{rng_for, stream_id};
use crate::stats::{linear_fit, mean, quantile};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const QPI_RUN_STREAM: u8 = 0x51;
const QPI_SCALING_STREAM: u8 = 0x52;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    QpeDist,
    QpeVsMc,
    QpiRun,
    QpiScaling,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::QpeDist => "qpe-dist",
            Self::QpeVsMc => "qpe-vs-mc",
            Self::QpiRun => "qpi-run",
            Self::QpiScaling => "qpi-scaling",
        }
    }
}

/// The decision problem: a two-armed bandit, an inline MDP, or an MDP JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Problem {
    Bandit(TwoArmedBandit),
    Mdp(Mdp),
    File(PathBuf),
}

/// A single value or a list, e.g. `"n": 7` or `"n": [3, 4, 5]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

impl OneOrMany {
    pub fn to_vec(&self) -> Vec<usize> {
        match self {
            Self::One(v) => vec![*v],
            Self::Many(v) => v.clone(),
        }
    }
}

/// Experiment parameters; every field is optional and defaults depend on the
/// experiment kind.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<Problem>,
    /// Policy evaluated by `qpe-dist` and `qpe-vs-mc`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<Policy>,
    /// Explicit policy set for the policy-iteration experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy_set: Option<Vec<Policy>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_policy: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<OneOrMany>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patience: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Bandit policy-set size `N`, or a list of sizes for `qpi-scaling`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policies: Option<OneOrMany>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reestimate: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Decision problem with horizon and discount overrides applied.
    fn mdp(&self, default: TwoArmedBandit, default_horizon: usize) -> Result<Mdp> {
        let gamma = self.gamma.unwrap_or(1.0);
        match &self.problem {
            None => default.to_mdp(self.horizon.unwrap_or(default_horizon), gamma),
            Some(Problem::Bandit(b)) => b.to_mdp(self.horizon.unwrap_or(default_horizon), gamma),
            Some(p) => {
                let mut mdp = match p {
                    Problem::Mdp(m) => m.clone(),
                    Problem::File(path) => {
                        let text = std::fs::read_to_string(path)
                            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                        serde_json::from_str(&text)
                            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
                    }
                    Problem::Bandit(_) => unreachable!(),
                };
                if let Some(h) = self.horizon {
                    mdp = mdp.with_horizon(h)?;
                }
                if let Some(g) = self.gamma {
                    mdp = mdp.with_discount(g)?;
                }
                Ok(mdp)
            }
        }
    }

    fn is_bandit(&self) -> bool {
        matches!(self.problem, None | Some(Problem::Bandit(_)))
    }

    /// Policy to evaluate: explicit, `π(←) = 0.5` for bandits, else uniform.
    fn evaluated_policy(&self, mdp: &Mdp) -> Result<Policy> {
        let policy = match &self.policy {
            Some(p) => p.clone(),
            None => {
                let row = vec![1.0 / mdp.num_actions() as f64; mdp.num_actions()];
                Policy::new(vec![row; mdp.num_states()])?
            }
        };
        policy.check_against(mdp)?;
        Ok(policy)
    }

    fn single_n(&self) -> Result<Option<usize>> {
        match &self.n {
            None => Ok(None),
            Some(v) => match v.to_vec().as_slice() {
                [n] => Ok(Some(*n)),
                _ => Err(Error::Config(
                    "n must be a single value for this experiment".into(),
                )),
            },
        }
    }

    /// Phase-estimation configuration: `n` from `ε` unless overridden, `t`
    /// from `δ` unless overridden.
    fn qpe_config(&self, lower: f64, upper: f64, epsilon: f64, delta: f64) -> Result<QpeConfig> {
        let mut config = match self.single_n()? {
            Some(n) => QpeConfig::new(n, delta, lower, upper)?,
            None => config_for(epsilon, delta, lower, upper)?,
        };
        if let Some(t) = self.t {
            config = config.with_t(t)?;
        }
        if config.t > 24 {
            return Err(Error::QubitBudget {
                requested: config.t,
                budget: 24,
            });
        }
        Ok(config)
    }

    fn search_config(&self) -> Result<GroverSearchConfig> {
        let search = GroverSearchConfig {
            lambda: self.lambda.unwrap_or(8.0 / 7.0),
            patience: self.patience.unwrap_or(30),
            max_iterations: self.max_iterations,
            reestimate: self.reestimate.unwrap_or(false),
        };
        search.validate()?;
        Ok(search)
    }

    fn policy_set(&self, size: usize) -> Result<PolicySet> {
        match &self.policy_set {
            Some(set) => PolicySet::new(set.clone()),
            None if self.is_bandit() => PolicySet::bandit(size),
            None => Err(Error::Config(
                "policy iteration on a general MDP needs an explicit policy_set".into(),
            )),
        }
    }
}

/// A rendered experiment result.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub kind: ExperimentKind,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Value,
    /// Set when a run hit its iteration cap.
    pub aborted: bool,
}

impl ExperimentOutput {
    /// CSV text: `#` metadata lines, header, rows.
    pub fn to_csv(&self, config: &ExperimentConfig) -> Result<String> {
        let echo = serde_json::to_string(config).map_err(|e| Error::Config(e.to_string()))?;
        let mut text = format!(
            "# qpi {VERSION}\n# experiment: {}\n# seed: {}\n# config: {echo}\n",
            self.kind.name(),
            config.seed()
        );
        let mut writer = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Config(e.to_string());
        writer.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            writer.write_record(row).map_err(io)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Config(e.to_string()))?;
        text.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(text)
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serialises")
    }

    /// Writes `path` (CSV) and the summary next to it with a `.json` extension.
    pub fn write(&self, config: &ExperimentConfig, path: &Path) -> std::io::Result<PathBuf> {
        let csv = self
            .to_csv(config)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, csv)?;
        let sidecar = sidecar_path(path);
        std::fs::write(&sidecar, self.summary_json() + "\n")?;
        Ok(sidecar)
    }
}

/// `out.csv` → `out.json`; other names get `.json` appended.
pub fn sidecar_path(path: &Path) -> PathBuf {
    if path.extension().is_some_and(|e| e == "csv") {
        path.with_extension("json")
    } else {
        let mut s = path.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    }
}

pub fn run(kind: ExperimentKind, config: &ExperimentConfig) -> Result<ExperimentOutput> {
    match kind {
        ExperimentKind::QpeDist => run_qpe_dist(config),
        ExperimentKind::QpeVsMc => run_qpe_vs_mc(config),
        ExperimentKind::QpiRun => run_qpi(config),
        ExperimentKind::QpiScaling => run_qpi_scaling(config),
    }
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Full outcome distribution of phase estimation for one policy.
/// Defaults: bandit `p(0|←) = 0.55`, `p(0|→) = 0.65`, `H = 2`, `π(←) = 0.5`,
/// `ε = 0.025`, `δ = 0.05`.
pub fn run_qpe_dist(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mdp = config.mdp(TwoArmedBandit::new(0.55, 0.65)?, 2)?;
    let policy = config.evaluated_policy(&mdp)?;
    let encoding = ReturnEncoding::auto(&mdp)?;
    let epsilon = config.epsilon.unwrap_or(0.025);
    let delta = config.delta.unwrap_or(0.05);
    let qpe = config.qpe_config(encoding.lower, encoding.upper, epsilon, delta)?;
    let eval = QpeEvaluator::with_encoding(&mdp, &policy, &encoding, &qpe)?;
    let truth = exact_value(&mdp, &policy)?;
    let tolerance = if config.single_n()?.is_some() {
        qpe.epsilon
    } else {
        epsilon
    };
    let in_eps_mass = eval.mass_within(truth, tolerance);
    let rows = eval
        .distribution()
        .probabilities()
        .iter()
        .enumerate()
        .map(|(x, p)| {
            vec![
                x.to_string(),
                fmt(qpe.decode(x).expect("in range")),
                fmt(*p),
            ]
        })
        .collect();
    Ok(ExperimentOutput {
        kind: ExperimentKind::QpeDist,
        header: vec!["x", "value", "probability"],
        rows,
        summary: json!({
            "experiment": "qpe-dist",
            "exact_value": truth,
            "encoded_value": eval.encoded_value(),
            "tolerance": tolerance,
            "in_epsilon_mass": in_eps_mass,
            "epsilon_bound": qpe.epsilon,
            "delta": qpe.delta,
            "n": qpe.n,
            "t": qpe.t,
            "lower": qpe.lower,
            "upper": qpe.upper,
            "a_applications": qpe.a_applications(),
            "seed": config.seed(),
        }),
        aborted: false,
    })
}

/// Median errors of phase estimation (`t = n`) and Monte-Carlo at matched
/// sample counts. Defaults: bandit with `H = 1`, `π(←) = 0.5`,
/// `n ∈ {3, …, 8}`, 201 trials.
pub fn run_qpe_vs_mc(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mdp = config.mdp(TwoArmedBandit::new(0.55, 0.65)?, 1)?;
    let policy = config.evaluated_policy(&mdp)?;
    let ns = config
        .n
        .as_ref()
        .map_or_else(|| (3..=8).collect(), OneOrMany::to_vec);
    if ns.is_empty() {
        return Err(Error::Config("n list is empty".into()));
    }
    let trials = config.trials.unwrap_or(DEFAULT_TRIALS);
    let table = matched_comparison(&mdp, &policy, &ns, trials, config.seed())?;
    let rows = table
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.qsamples.to_string(),
                fmt(r.qpe_median_err),
                fmt(r.mc_median_err),
                fmt(r.epsilon_bound),
            ]
        })
        .collect();
    Ok(ExperimentOutput {
        kind: ExperimentKind::QpeVsMc,
        header: vec![
            "n",
            "qsamples",
            "qpe_median_err",
            "mc_median_err",
            "epsilon_bound",
        ],
        rows,
        summary: json!({
            "experiment": "qpe-vs-mc",
            "exact_value": exact_value(&mdp, &policy)?,
            "trials": trials,
            "qpe_within_bound": table.iter().all(|r| r.qpe_median_err <= r.epsilon_bound),
            "qpe_below_mc": table.iter().map(|r| (r.n, r.qpe_median_err < r.mc_median_err)).collect::<Vec<_>>(),
            "rows": table,
            "seed": config.seed(),
        }),
        aborted: false,
    })
}

/// Shared setup of the policy-iteration experiments.
struct QpiSetup {
    mdp: Mdp,
    qpe: QpeConfig,
    search: GroverSearchConfig,
    epsilon: f64,
    start: Option<usize>,
}

impl QpiSetup {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        let mdp = config.mdp(TwoArmedBandit::new(1.0, 0.0)?, 1)?;
        let encoding = ReturnEncoding::auto(&mdp)?;
        let epsilon = config.epsilon.unwrap_or(0.0125);
        let delta = config.delta.unwrap_or(0.07);
        Ok(Self {
            qpe: config.qpe_config(encoding.lower, encoding.upper, epsilon, delta)?,
            search: config.search_config()?,
            epsilon,
            start: config.start_policy,
            mdp,
        })
    }

    fn true_values(&self, set: &PolicySet) -> Result<Vec<f64>> {
        set.policies()
            .iter()
            .map(|p| exact_value(&self.mdp, p))
            .collect()
    }

    /// The configured start policy, or else the first policy of lowest value.
    fn start_in(&self, values: &[f64]) -> usize {
        self.start.unwrap_or_else(|| {
            (0..values.len()).fold(
                0,
                |worst, i| if values[i] < values[worst] { i } else { worst },
            )
        })
    }
}

/// Whether a run returned a policy within `epsilon` of the best value in the set.
fn is_success(run: &QpiRun, values: &[f64], epsilon: f64) -> bool {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    run.status == RunStatus::Converged && values[run.policy] >= best - epsilon
}

/// One trace of quantum policy iteration. Defaults: deterministic bandit
/// `p(0|←) = 1`, `p(1|→) = 1`, `H = 1`, `N = 64`, `ε = 0.0125`, `δ = 0.07`,
/// `C = 30`, `λ = 8/7`, starting from the worst policy (the one that always
/// pulls the left arm).
pub fn run_qpi(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let setup = QpiSetup::new(config)?;
    let size = match config.policies.as_ref().map(OneOrMany::to_vec).as_deref() {
        None => 64,
        Some([n]) => *n,
        Some(_) => {
            return Err(Error::Config(
                "qpi-run takes a single policy-set size".into(),
            ))
        }
    };
    let set = config.policy_set(size)?;
    let dist = build_search_distribution(&setup.mdp, &set, &setup.qpe)?;
    let values = setup.true_values(&set)?;
    let mut rng = rng_for(config.seed(), stream_id(QPI_RUN_STREAM, 0, 0));
    let run = policy_iteration_on(&dist, setup.start_in(&values), &setup.search, &mut rng)?;
    let optimum = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rows = run
        .records
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                fmt(r.value),
                r.policy.to_string(),
                fmt(r.candidate_value),
                r.candidate_policy.to_string(),
                r.rotations.to_string(),
                fmt(r.m),
                r.accepted.to_string(),
            ]
        })
        .collect();
    Ok(ExperimentOutput {
        kind: ExperimentKind::QpiRun,
        header: vec![
            "k",
            "v_k",
            "policy",
            "candidate_value",
            "candidate_policy",
            "rotations_j",
            "m",
            "accepted",
        ],
        rows,
        summary: json!({
            "experiment": "qpi-run",
            "status": run.status,
            "policies": set.len(),
            "start_policy": run.start_policy,
            "initial_value": run.initial_value,
            "final_policy": run.policy,
            "final_estimate": run.value,
            "final_true_value": values[run.policy],
            "optimal_value": optimum,
            "epsilon": setup.epsilon,
            "success": is_success(&run, &values, setup.epsilon),
            "estimate_within_epsilon": (run.value - optimum).abs() <= setup.epsilon,
            "iterations": run.iterations(),
            "total_rotations": run.total_rotations,
            "non_patience_rotations": run.non_patience_rotations,
            "a_applications": run.a_applications,
            "n": setup.qpe.n,
            "t": setup.qpe.t,
            "delta": setup.qpe.delta,
            "patience": setup.search.patience,
            "lambda": setup.search.lambda,
            "seed": config.seed(),
        }),
        aborted: run.status == RunStatus::Aborted,
    })
}

/// Statistics of one policy-set size in the scaling study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub policies: usize,
    pub sqrt_n: f64,
    pub attempts: usize,
    pub successes: usize,
    pub aborted: usize,
    pub success_rate: f64,
    pub mean_rotations: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub mean_total_rotations: f64,
}

/// Grover rotations (excluding the last `C` iterations) until an ε-optimal
/// policy is found, over `trials` successful runs per policy-set size,
/// followed by a least-squares fit against `√N`.
/// Defaults as in [`run_qpi`] with `N ∈ {100, 225, 400, 625}` and 100 trials.
///
/// Runs are drawn until `trials` succeed or `2·trials` have been attempted;
/// `success_rate` is successes over attempts.
pub fn run_qpi_scaling(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let setup = QpiSetup::new(config)?;
    let sizes = config
        .policies
        .as_ref()
        .map_or_else(|| vec![100, 225, 400, 625], OneOrMany::to_vec);
    if sizes.is_empty() {
        return Err(Error::Config("policy-set size list is empty".into()));
    }
    let trials = config.trials.unwrap_or(100);
    if trials == 0 {
        return Err(Error::Config("trials must be positive".into()));
    }
    let mut table = Vec::with_capacity(sizes.len());
    for (group, &size) in sizes.iter().enumerate() {
        let set = config.policy_set(size)?;
        let dist = build_search_distribution(&setup.mdp, &set, &setup.qpe)?;
        let values = setup.true_values(&set)?;
        let start = setup.start_in(&values);
        let max_attempts = 2 * trials;
        let mut successful = Vec::with_capacity(trials);
        let mut totals = Vec::with_capacity(trials);
        let mut attempts = 0;
        let mut aborted = 0;
        // batches of independent seeds; results are consumed in attempt order
        while successful.len() < trials && attempts < max_attempts {
            let batch = (trials - successful.len()).min(max_attempts - attempts);
            let runs = crate::par::map_range(batch, |i| {
                let stream = stream_id(QPI_SCALING_STREAM, group as u32, (attempts + i) as u32);
                policy_iteration_on(
                    &dist,
                    start,
                    &setup.search,
                    &mut rng_for(config.seed(), stream),
                )
            });
            for run in runs {
                let run = run?;
                attempts += 1;
                if run.status == RunStatus::Aborted {
                    aborted += 1;
                }
                if is_success(&run, &values, setup.epsilon) {
                    successful.push(run.non_patience_rotations as f64);
                    totals.push(run.total_rotations as f64);
                }
            }
        }
        table.push(ScalingRow {
            policies: size,
            sqrt_n: (size as f64).sqrt(),
            attempts,
            successes: successful.len(),
            aborted,
            success_rate: successful.len() as f64 / attempts as f64,
            mean_rotations: mean(&successful),
            q1: quantile(&successful, 0.25),
            median: quantile(&successful, 0.5),
            q3: quantile(&successful, 0.75),
            mean_total_rotations: mean(&totals),
        });
    }
    let xs: Vec<f64> = table.iter().map(|r| r.sqrt_n).collect();
    let ys: Vec<f64> = table.iter().map(|r| r.mean_rotations).collect();
    let fit = linear_fit(&xs, &ys);
    let rows = table
        .iter()
        .map(|r| {
            vec![
                r.policies.to_string(),
                fmt(r.sqrt_n),
                fmt(r.mean_rotations),
                fmt(r.q1),
                fmt(r.median),
                fmt(r.q3),
                fmt(r.success_rate),
                r.successes.to_string(),
                r.attempts.to_string(),
            ]
        })
        .collect();
    Ok(ExperimentOutput {
        kind: ExperimentKind::QpiScaling,
        header: vec![
            "N",
            "sqrtN",
            "mean_rotations",
            "q1",
            "median",
            "q3",
            "success_rate",
            "successes",
            "attempts",
        ],
        rows,
        summary: json!({
            "experiment": "qpi-scaling",
            "fit": fit,
            "fit_applicable": fit.is_some(),
            "rows": table,
            "trials": trials,
            "epsilon": setup.epsilon,
            "n": setup.qpe.n,
            "t": setup.qpe.t,
            "patience": setup.search.patience,
            "lambda": setup.search.lambda,
            "seed": config.seed(),
        }),
        aborted: table.iter().any(|r| r.aborted > 0),
    })
}
