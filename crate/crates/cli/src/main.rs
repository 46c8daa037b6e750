use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmalab_cli::{diff_transcripts, run_config, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "qmalab-cli", version, about = "Seeded qmalab experiments with deterministic reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Run {
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        experiment: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare two transcript dumps.
    Diff { left: String, right: String },
    /// List registered experiments.
    List,
}

fn load(config: Option<String>, experiment: Option<String>, seed: Option<u64>, trials: Option<u64>, out: Option<String>) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match config {
        Some(path) => ExperimentConfig::from_json(&fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{path}: {e}")))?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(e) = experiment {
        cfg.experiment = e;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if out.is_some() {
        cfg.out = out;
    }
    Ok(cfg)
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.block());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            qmalab_cli::config::EXPERIMENTS.iter().for_each(|e| println!("{e}"));
            ExitCode::SUCCESS
        }
        Command::Diff { left, right } => {
            let read = |p: &str| fs::read_to_string(p).map_err(CliError::from);
            let verdict = match read(&left).and_then(|a| Ok(diff_transcripts(&a, &read(&right)?)?)) {
                Ok(v) => v,
                Err(e) => return fail(e),
            };
            println!("{}", serde_json::to_string(&verdict).expect("verdict serializes"));
            if verdict.equal {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Run { config, experiment, seed, trials, out, threads } => {
            let cfg = match load(config, experiment, seed, trials, out) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let (report, text) = match run_config(&cfg, threads) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            match &cfg.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &text) {
                        return fail(e.into());
                    }
                }
                None => print!("{text}"),
            }
            if report.falsified() {
                eprintln!("{}", serde_json::json!({ "falsified": report.violations }));
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
