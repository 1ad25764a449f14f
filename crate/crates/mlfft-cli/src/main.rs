use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use mlfft_cli::build::{run_build, BuildArgs};
use mlfft_cli::config::ExperimentConfig;
use mlfft_cli::error::{CliError, EXIT_USAGE};
use mlfft_cli::experiment::run_experiment;
use mlfft_cli::verify::run_verify;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mlfft",
    about = "Sampling multivariate periodic functions along multiple rank-1 lattices",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a reconstructing multiple lattice for one index set.
    Build {
        /// Index set, e.g. hc:d=3,N=8,T=0 or dyadic:d=2,n=4 (suffix ,even
        /// filters to even frequencies) or file:<path>.
        #[arg(long)]
        set: String,
        /// Oversampling parameter of the randomized construction (> 1).
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        /// Failure probability bound in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long)]
        seed: u64,
        /// Extra construction attempts after an uncovered first run.
        #[arg(long, default_value_t = 3)]
        retries: u32,
        /// Output directory for index_set.txt, lattice.json, report.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Sweep reconstruction errors over a refinement range, writing CSV.
    Experiment {
        /// JSON experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Run directory for results.csv, config.json, metadata.json.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: one per core).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a stored lattice against a stored index set.
    Verify {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        set: PathBuf,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Build { set, c, delta, seed, retries, out } => {
            run_build(&BuildArgs { set: &set, c, delta, seed, retries, out: &out })
        }
        Cmd::Experiment { config, out, threads } => {
            let cfg = ExperimentConfig::load(&config)?;
            let outcome = run_experiment(&cfg, &out, threads)?;
            println!(
                "wrote {} rows to {} ({} failed)",
                outcome.rows_written,
                out.join("results.csv").display(),
                outcome.rows_failed
            );
            Ok(())
        }
        Cmd::Verify { lattice, set } => run_verify(&lattice, &set),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprint!("{err}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
