use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use drocc::experiment::{run, ExperimentConfig, ExperimentError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliCommand {
    Solve,
    Bounds,
    Converge,
    BetaStudy,
    Coverage,
}

impl CliCommand {
    fn name(self) -> &'static str {
        match self {
            CliCommand::Solve => "solve",
            CliCommand::Bounds => "bounds",
            CliCommand::Converge => "converge",
            CliCommand::BetaStudy => "beta-study",
            CliCommand::Coverage => "coverage",
        }
    }
}

/// Sampled distributionally robust chance-constrained experiments.
#[derive(Debug, Parser)]
#[command(name = "drocc", version)]
struct Cli {
    #[arg(value_enum)]
    command: CliCommand,
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides `output_path` in the config. Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    verbose: bool,
}

fn execute(cli: &Cli) -> Result<(), ExperimentError> {
    let text = fs::read_to_string(&cli.config)
        .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let config = ExperimentConfig::from_json(&text)?;
    if config.command.name() != cli.command.name() {
        return Err(ExperimentError::Config(format!(
            "command line asks for {} but the config is for {}",
            cli.command.name(),
            config.command.name()
        )));
    }
    if cli.verbose {
        eprintln!(
            "drocc {}: {} sizes x {} seeds",
            config.command.name(),
            config.omega_sizes.len(),
            config.seeds.len()
        );
    }
    let table = run(&config)?;
    let output = cli
        .output
        .clone()
        .or_else(|| config.output_path.as_ref().map(PathBuf::from));
    match output {
        Some(path) => {
            let file = fs::File::create(&path).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
            table.write_csv(io::BufWriter::new(file))?;
            if cli.verbose {
                eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
            }
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write_csv(&mut lock)?;
            lock.flush().map_err(|e| ExperimentError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
