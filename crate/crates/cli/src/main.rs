mod error;
mod ingest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use burstopt::experiment::{BurstLengthExperiment, SequenceLengthExperiment, TrialSettings};
use burstopt::{
    approx_exp, approx_geo, exp_alpha, exp_mean, geo_alpha, geo_mean, solve_exp_alpha_exact,
    viterbi, BurstError, BurstParams, DelaySequence, Family, Solution,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;
use ingest::{ingest, Granularity, IngestOptions};
use output::{sig, write_run, Summary};

#[derive(Parser, Debug)]
#[command(
    name = "burstopt",
    version,
    about = "Burst detection with optimized base and change rates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit levels to a delay (or timestamp) file.
    Run(RunArgs),
    /// Planted-burst experiments; writes trials.tsv and summary.tsv.
    Experiment {
        #[command(subcommand)]
        which: ExperimentKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Exp,
    Geo,
}

impl From<Model> for Family {
    fn from(m: Model) -> Self {
        match m {
            Model::Exp => Family::Exp,
            Model::Geo => Family::Geo,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// α and β given.
    Fixed,
    /// α given, β from the (1 + ε) scan.
    OptBeta,
    /// α and β from scans.
    OptBoth,
    /// α given, β exact (exponential model only).
    Exact,
    /// α given, β from the mean delay.
    Mean,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Fixed => "fixed",
            Mode::OptBeta => "opt-beta",
            Mode::OptBoth => "opt-both",
            Mode::Exact => "exact",
            Mode::Mean => "mean",
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    /// One value per line: delays, or epoch seconds with --timestamps.
    input: PathBuf,
    #[arg(short, long)]
    output_dir: PathBuf,
    #[arg(long, value_enum, default_value = "exp")]
    model: Model,
    #[arg(long, value_enum, default_value = "opt-beta")]
    mode: Mode,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(short, long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Skip β candidates ruled out by refitting (exponential scans).
    #[arg(long, overrides_with = "no_prune")]
    prune: bool,
    #[arg(long, overrides_with = "prune")]
    no_prune: bool,
    /// Add this amount to every delay, in granularity units.
    #[arg(long)]
    shift_delays: Option<f64>,
    /// Input lines are non-decreasing timestamps (epoch seconds).
    #[arg(long)]
    timestamps: bool,
    #[arg(long, value_enum, default_value = "seconds")]
    granularity: Granularity,
    /// Largest n accepted by --mode exact.
    #[arg(long, default_value_t = 64)]
    max_exact_n: usize,
}

#[derive(Subcommand, Debug)]
enum ExperimentKind {
    /// Fixed n, burst length 50..=250.
    Fig3(ExperimentArgs),
    /// n in 50..=500 with burst length n/3.
    Fig4(ExperimentArgs),
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(short, long)]
    output_dir: PathBuf,
    /// Trials per configuration (default 100 for fig3, 300 for fig4).
    #[arg(long)]
    trials: Option<usize>,
    /// Sequence length for fig3.
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 2016)]
    seed: u64,
    #[arg(short, long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Exponential rate outside the burst.
    #[arg(long, default_value_t = 1.0)]
    base_rate: f64,
    /// Exponential rate inside the burst.
    #[arg(long, default_value_t = 2.0)]
    burst_rate: f64,
}

fn need(value: Option<f64>, flag: &str, mode: Mode) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--mode {} requires {flag}", mode.name())))
}

fn solve(args: &RunArgs, s: &DelaySequence) -> Result<Solution, CliError> {
    let family = Family::from(args.model);
    let (gamma, k, eps) = (args.gamma, args.k, args.epsilon);
    let prune = !args.no_prune;
    let sol = match (args.mode, family) {
        (Mode::Fixed, _) => {
            let p = BurstParams::new(
                family,
                need(args.alpha, "--alpha", args.mode)?,
                need(args.beta, "--beta", args.mode)?,
                gamma,
                k,
            )?;
            viterbi(s, &p)?
        }
        (Mode::OptBeta, Family::Exp) => exp_alpha(
            s,
            need(args.alpha, "--alpha", args.mode)?,
            gamma,
            k,
            eps,
            prune,
        )?,
        (Mode::OptBeta, Family::Geo) => {
            geo_alpha(s, need(args.alpha, "--alpha", args.mode)?, gamma, k, eps)?
        }
        (Mode::OptBoth, Family::Exp) => approx_exp(s, gamma, k, eps, prune)?,
        (Mode::OptBoth, Family::Geo) => approx_geo(s, gamma, k, eps)?,
        (Mode::Exact, Family::Geo) => {
            return Err(CliError::Usage(
                "--mode exact is only available with --model exp".into(),
            ))
        }
        (Mode::Exact, Family::Exp) => {
            let alpha = need(args.alpha, "--alpha", args.mode)?;
            if s.len() > args.max_exact_n {
                return Err(BurstError::Capacity(format!(
                    "exact mode accepts n <= {} (--max-exact-n); got n = {}",
                    args.max_exact_n,
                    s.len()
                ))
                .into());
            }
            solve_exp_alpha_exact(s, alpha, gamma, k)?
        }
        (Mode::Mean, Family::Exp) => {
            exp_mean(s, need(args.alpha, "--alpha", args.mode)?, gamma, k)?
        }
        (Mode::Mean, Family::Geo) => {
            geo_mean(s, need(args.alpha, "--alpha", args.mode)?, gamma, k)?
        }
    };
    Ok(sol)
}

/// Mode-specific flags, checked before any input is read.
fn check_config(args: &RunArgs) -> Result<(), CliError> {
    if args.mode == Mode::Exact && args.model == Model::Geo {
        return Err(CliError::Usage(
            "--mode exact is only available with --model exp".into(),
        ));
    }
    if args.mode != Mode::OptBoth {
        need(args.alpha, "--alpha", args.mode)?;
    }
    if args.mode == Mode::Fixed {
        need(args.beta, "--beta", args.mode)?;
    }
    Ok(())
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    check_config(args)?;
    let opts = IngestOptions {
        family: args.model.into(),
        timestamps: args.timestamps,
        granularity: args.granularity,
        shift: args.shift_delays,
    };
    let s = ingest(&args.input, &opts)?;
    let start = Instant::now();
    let sol = solve(args, &s)?;
    let runtime = start.elapsed().as_secs_f64() * 1e3;
    let uses_epsilon = matches!(args.mode, Mode::OptBeta | Mode::OptBoth);
    let summary = Summary {
        model: Family::from(args.model).name(),
        mode: args.mode.name(),
        n: s.len(),
        k: args.k,
        gamma: sig(args.gamma),
        alpha: sig(sol.alpha),
        beta: sig(sol.beta),
        score: sig(sol.score),
        epsilon: if uses_epsilon {
            sig(args.epsilon)
        } else {
            None
        },
        viterbi_calls: sol.viterbi_calls,
        runtime_ms: sig(runtime),
    };
    let json = write_run(&args.output_dir, sol.levels.levels(), &summary)?;
    println!("{json}");
    Ok(())
}

fn settings(args: &ExperimentArgs) -> TrialSettings {
    TrialSettings {
        k: args.k,
        alpha: args.alpha,
        gamma: args.gamma,
        epsilon: args.epsilon,
        base_rate: args.base_rate,
        burst_rate: args.burst_rate,
        seed: args.seed,
    }
}

fn experiment(which: &ExperimentKind) -> Result<(), CliError> {
    let (report, dir) = match which {
        ExperimentKind::Fig3(args) => {
            let mut exp = BurstLengthExperiment {
                n: args.n,
                settings: settings(args),
                ..BurstLengthExperiment::default()
            };
            exp.burst_lengths.retain(|&len| len <= args.n);
            if let Some(t) = args.trials {
                exp.trials = t;
            }
            (exp.run()?, &args.output_dir)
        }
        ExperimentKind::Fig4(args) => {
            let mut exp = SequenceLengthExperiment {
                settings: settings(args),
                ..SequenceLengthExperiment::default()
            };
            if let Some(t) = args.trials {
                exp.trials = t;
            }
            (exp.run()?, &args.output_dir)
        }
    };
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("trials.tsv"), report.trials_tsv())?;
    let summary = report.summary_tsv();
    std::fs::write(dir.join("summary.tsv"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Experiment { which } => experiment(which),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("burstopt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
