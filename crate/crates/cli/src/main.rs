use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use plapmix::run::{run, verify_formulas, RunArgs};

#[derive(Parser)]
#[command(
    name = "plapmix",
    version,
    about = "First eigenvalue of the mixed local/nonlocal p-Laplacian and its p -> infinity limit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a TOML config and write the report and CSV tables.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.dir` of the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Log progress and write per-solve trace tables.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Check the closed form of Lambda for one (R_Omega, R_J) pair.
    VerifyFormulas {
        #[arg(long, allow_negative_numbers = true)]
        r_omega: f64,
        #[arg(long, allow_negative_numbers = true)]
        r_j: f64,
        #[arg(long, short)]
        verbose: bool,
    },
}

fn init_logging(verbose: bool) {
    let level = if verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out_dir, verbose } => {
            init_logging(verbose);
            run(&RunArgs { config, out_dir, verbose })
        }
        Command::VerifyFormulas { r_omega, r_j, verbose } => {
            init_logging(verbose);
            verify_formulas(r_omega, r_j)
        }
    };
    ExitCode::from(code as u8)
}
