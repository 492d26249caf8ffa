use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qpi_core::experiments::{self, ExperimentConfig, ExperimentKind, OneOrMany};
use qpi_core::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_ABORTED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qpi",
    version,
    about = "Quantum policy evaluation and iteration experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outcome distribution of phase estimation for one policy.
    QpeDist(Overrides),
    /// Median errors of phase estimation and Monte-Carlo at matched sample counts.
    QpeVsMc(Overrides),
    /// One trace of quantum policy iteration.
    QpiRun(Overrides),
    /// Grover rotations against policy-set size, with a fit in √N.
    QpiScaling(Overrides),
}

#[derive(Args)]
struct Overrides {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path; the JSON summary goes next to it. Prints to stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Precision bits; a comma-separated list for qpe-vs-mc.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Policy-set size; a comma-separated list for qpi-scaling.
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<usize>>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
}

fn one_or_many(v: Vec<usize>) -> OneOrMany {
    match v.as_slice() {
        [x] => OneOrMany::One(*x),
        _ => OneOrMany::Many(v),
    }
}

impl Overrides {
    fn into_config(self, kind: ExperimentKind) -> Result<ExperimentConfig, Error> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        match c.experiment {
            Some(k) if k != kind => {
                return Err(Error::Config(format!(
                    "config is for {}, command is {}",
                    k.name(),
                    kind.name()
                )))
            }
            _ => c.experiment = Some(kind),
        }
        c.seed = self.seed.or(c.seed);
        c.out = self.out.or(c.out);
        c.epsilon = self.epsilon.or(c.epsilon);
        c.delta = self.delta.or(c.delta);
        c.n = self.n.map(one_or_many).or(c.n);
        c.t = self.t.or(c.t);
        c.patience = self.patience.or(c.patience);
        c.lambda = self.lambda.or(c.lambda);
        c.policies = self.policies.map(one_or_many).or(c.policies);
        c.horizon = self.horizon.or(c.horizon);
        c.gamma = self.gamma.or(c.gamma);
        c.trials = self.trials.or(c.trials);
        Ok(c)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::QubitBudget { .. } | Error::EnumerationBudget { .. } => EXIT_BUDGET,
        _ => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, overrides) = match cli.command {
        Command::QpeDist(o) => (ExperimentKind::QpeDist, o),
        Command::QpeVsMc(o) => (ExperimentKind::QpeVsMc, o),
        Command::QpiRun(o) => (ExperimentKind::QpiRun, o),
        Command::QpiScaling(o) => (ExperimentKind::QpiScaling, o),
    };
    let result = overrides
        .into_config(kind)
        .and_then(|config| experiments::run(kind, &config).map(|out| (config, out)));
    let (config, output) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match &config.out {
        Some(path) => match output.write(&config, path) {
            Ok(sidecar) => eprintln!("wrote {} and {}", path.display(), sidecar.display()),
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        None => match output.to_csv(&config) {
            Ok(csv) => {
                print!("{csv}");
                eprintln!("{}", output.summary_json());
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
    }
    if output.aborted {
        eprintln!("run aborted: iteration cap reached, trace is partial");
        return ExitCode::from(EXIT_ABORTED);
    }
    ExitCode::SUCCESS
}
