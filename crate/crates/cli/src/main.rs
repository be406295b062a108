use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use orlicz_runner::{run, summary, write_artifacts, Command, Overrides, ProblemConfig, RunError};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Audit,
    Solve,
    Sweep,
    Sequence,
    LambdaStar,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Audit => Command::Audit,
            CommandArg::Solve => Command::Solve,
            CommandArg::Sweep => Command::Sweep,
            CommandArg::Sequence => Command::Sequence,
            CommandArg::LambdaStar => Command::LambdaStar,
        }
    }
}

/// Eigenvalue experiments for quasilinear Dirichlet problems with Orlicz
/// growth and variable-exponent right-hand sides.
#[derive(Debug, Parser)]
#[command(name = "orlicz-spectra", version)]
struct Cli {
    #[arg(value_enum)]
    command: CommandArg,
    /// JSON problem configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Comma-separated λ values for `sweep`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lambdas: Option<Vec<f64>>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for artifacts; nothing is written without it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run even when the audit rules the command out.
    #[arg(long)]
    force: bool,
}

fn exit_code(e: &RunError) -> u8 {
    match e {
        RunError::Config(_) | RunError::Usage(_) => 2,
        RunError::Refused(_) => 3,
        RunError::Numeric(_) | RunError::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let outcome = ProblemConfig::from_json(&text).map_err(RunError::from).and_then(|cfg| {
        let overrides = Overrides {
            lambda: cli.lambda,
            lambdas: cli.lambdas.clone(),
            k_max: cli.k_max,
            seed: cli.seed,
            force: cli.force,
        };
        run(cli.command.into(), &cfg, &overrides)
    });
    let record = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    print!("{}", summary(&record));
    if let Some(dir) = &cli.out {
        if let Err(e) = write_artifacts(&record, dir) {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    }
    eprintln!("wall time: {:.3} s", record.wall_time.as_secs_f64());
    if record.has_failures() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
