use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hardy_cli::{error_document, run, CliError, Command, Family, RunConfig};

/// Verification toolkit for weighted discrete p-Hardy inequalities.
#[derive(Debug, Parser)]
#[command(name = "hardy", version, about)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// Exponent p > 1.
    #[arg(long, default_value_t = 2.0)]
    p: f64,

    #[arg(long, value_enum, default_value_t = Family::Power)]
    family: Family,

    /// Power of v (power and copson families).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,

    /// Power of phi; defaults to (p-1)/p.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,

    /// Sequence file (JSON or CSV).
    #[arg(long)]
    input: Option<PathBuf>,

    /// Report file; `.csv` selects CSV for weight tables. Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = 100)]
    trials: usize,

    /// Largest support for fuzzing, and table length for weight commands.
    #[arg(long, default_value_t = 50)]
    support_max: usize,

    /// Relative tolerance for identity residuals and inequality slacks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl Args {
    fn into_config(self) -> RunConfig {
        let beta = self.beta.unwrap_or((self.p - 1.0) / self.p);
        RunConfig {
            command: self.command,
            p: self.p,
            family: self.family,
            alpha: self.alpha,
            beta,
            input_path: self.input,
            output_path: self.output,
            seed: self.seed,
            trials: self.trials,
            support_max: self.support_max,
            tol: self.tol,
        }
    }
}

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output_path {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("HARDY_LOG", "error")).init();
    let config = Args::parse().into_config();
    let code = match run(&config) {
        Ok(outcome) => match emit(&config, &outcome.document) {
            Ok(()) => outcome.exit_code(),
            Err(e) => {
                log::error!("{e}");
                print!("{}", error_document(config.command.name(), &e));
                2
            }
        },
        Err(e) => {
            log::error!("{e}");
            let doc = error_document(config.command.name(), &e);
            if emit(&config, &doc).is_err() {
                print!("{doc}");
            }
            2
        }
    };
    ExitCode::from(code)
}
