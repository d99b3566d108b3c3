use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slowlight_cli::{runner, CliError};

/// Reproducible EIT diffraction-control experiments: run a config, sweep a
/// parameter, or inspect derived quantities.
#[derive(Parser)]
#[command(name = "slowlight", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one experiment and write images, CSVs and a JSON report.
    Run {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the config once per value of a numeric parameter and aggregate
    /// the results.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Dotted path of the numeric config field to vary,
        /// e.g. medium.detuning.delta_over_gamma
        #[arg(long)]
        param: String,
        /// Comma-separated list of values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Concurrent runs.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Print derived quantities without simulating.
    Describe {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { common } => {
            let report = runner::run(&common.config, common.out.as_deref())?;
            println!(
                "run {:?} complete: {} measurement(s), {} warning(s)",
                report.name,
                report.measurements.len(),
                report.warnings.len()
            );
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Sweep {
            common,
            param,
            values,
            workers,
        } => {
            let parsed: Result<Vec<f64>, _> = values
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect();
            let parsed = parsed
                .map_err(|e| CliError::Config(format!("bad --values list: {e}")))?;
            let out = runner::sweep(&common.config, &param, &parsed, common.out.as_deref(), workers)?;
            println!(
                "sweep over {param} complete: {} point(s), aggregate at {}",
                parsed.len(),
                out.join("sweep.csv").display()
            );
            Ok(())
        }
        Command::Describe { config } => {
            print!("{}", runner::describe(&config)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
