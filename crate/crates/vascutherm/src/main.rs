use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vascutherm::cli::{self, OutputOptions};

#[derive(Parser)]
#[command(
    name = "vascutherm",
    version,
    about = "Finite-element solver and verification toolkit for actively cooled vascular plates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for generated files.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    /// Suppress progress output (errors still go to stderr as JSON).
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a configuration and export field CSV, VTK, and metrics JSON.
    Solve { config: PathBuf },
    /// Print the no-flow steady-state temperature of a configuration.
    Hss { config: PathBuf },
    /// Run the principle oracles on one configuration, or the comparison
    /// oracle on an ordered pair.
    Verify {
        config_a: PathBuf,
        config_b: Option<PathBuf>,
        /// Comma-separated oracle names (default: all applicable).
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
    },
    /// Re-solve across a list of parameter values and tabulate metrics.
    Sweep {
        config: PathBuf,
        /// One of: mass_flow_rate, inlet_temperature, f0 (SI units).
        #[arg(long)]
        param: String,
        /// Comma-separated values; negative values are accepted.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        values: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let options = OutputOptions {
        output_dir: args.output_dir,
        quiet: args.quiet,
    };
    let result = match &args.command {
        Command::Solve { config } => cli::run_solve(config, &options),
        Command::Hss { config } => cli::run_hss(config, &options),
        Command::Verify {
            config_a,
            config_b,
            checks,
        } => cli::run_verify(config_a, config_b.as_deref(), checks, &options).map(|_| ()),
        Command::Sweep {
            config,
            param,
            values,
        } => cli::run_sweep(config, param, values, &options),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("{}", error.to_json());
            ExitCode::from(u8::try_from(error.exit_code()).unwrap_or(1))
        }
    }
}
