use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use speclab::harness::{build_config, run_experiment, Experiment, RunOutcome};
use speclab::SpecError;

#[derive(Parser)]
#[command(name = "speclab", version, about = "Fourier spectral method experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a registered experiment.
    Run(RunArgs),
    /// List the registered experiments.
    List,
    /// Print the resolved configuration without running.
    Config(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    experiment: String,
    /// Flat key = value file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated degrees.
    #[arg(long = "N", value_name = "LIST")]
    n: Option<String>,
    #[arg(long)]
    tend: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated variants.
    #[arg(long)]
    variant: Option<String>,
    /// Step size, or `auto`.
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    cfl: Option<String>,
    /// Comma-separated snapshot times, or `auto`.
    #[arg(long)]
    snapshots: Option<String>,
    #[arg(long)]
    initial: Option<String>,
    /// Spectral viscosity order.
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    law: Option<String>,
    #[arg(long = "reference-cells")]
    reference_cells: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let pairs = [
            ("N", &self.n),
            ("tend", &self.tend),
            ("variant", &self.variant),
            ("dt", &self.dt),
            ("cfl", &self.cfl),
            ("snapshots", &self.snapshots),
            ("initial", &self.initial),
            ("r", &self.r),
            ("law", &self.law),
            ("reference_cells", &self.reference_cells),
            ("seed", &self.seed),
        ];
        let mut out: Vec<(&'static str, String)> = pairs
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect();
        if let Some(o) = &self.out {
            out.push(("out", o.display().to_string()));
        }
        out
    }

    fn resolve(&self) -> Result<speclab::harness::ExperimentConfig, SpecError> {
        let text = match &self.config {
            Some(p) => std::fs::read_to_string(p).map_err(|e| SpecError::Config(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        build_config(Some(&self.experiment), &text, &self.overrides())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<26}{}", e.name(), e.description());
            }
            ExitCode::SUCCESS
        }
        Command::Config(args) => match args.resolve() {
            Ok(cfg) => {
                print!("{}", cfg.emit());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("speclab: {e}");
                ExitCode::from(2)
            }
        },
        Command::Run(args) => {
            let cfg = match args.resolve() {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("speclab: {e}");
                    eprintln!("usage: speclab run <experiment> [--config FILE] [--N LIST] [--tend T] [--out DIR]");
                    return ExitCode::from(2);
                }
            };
            let record = match run_experiment(&cfg) {
                Ok(r) => r,
                Err(e @ (SpecError::Config(_) | SpecError::PastCriticalTime { .. } | SpecError::InvalidArgument(_))) => {
                    eprintln!("speclab: {e}");
                    return ExitCode::from(2);
                }
                Err(e @ (SpecError::NonFinite { .. } | SpecError::OutOfDomain { .. })) => {
                    eprintln!("speclab: blow-up: {e}");
                    return ExitCode::from(3);
                }
                Err(e) => {
                    eprintln!("speclab: {e}");
                    return ExitCode::FAILURE;
                }
            };
            if let Err(e) = record.write(&cfg.out) {
                eprintln!("speclab: {e}");
                return ExitCode::FAILURE;
            }
            let summary = record.table("summary.csv");
            print!("{}", summary.to_csv());
            if let RunOutcome::BlowUp { run, t } = &record.outcome {
                eprintln!("speclab: {run} blew up at t = {t}");
            }
            eprintln!("wrote {} files to {}", record.tables.len() + 1, cfg.out.display());
            ExitCode::from(record.exit_code() as u8)
        }
    }
}
