use std::path::PathBuf;
use std::process::ExitCode;

use cayley_spectra_cli::config::{ChainArgs, CommonArgs, RunConfig};
use cayley_spectra_cli::{cmd_chain, cmd_partition, cmd_spectrum, cmd_verify, write_report, Report};
use clap::{Parser, Subcommand};

/// Periodic wave functions on Cayley trees.
#[derive(Parser)]
#[command(name = "cayley-spectra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coset partition and neighbour-count matrix Q
    Partition(CommonArgs),
    /// Energies and coset vectors for a finite-index subgroup
    Spectrum(CommonArgs),
    /// Sequence solution for the integer-labelled chain
    Chain {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Re-check a spectrum or chain report on a ball
    Verify {
        /// Report produced by `spectrum` or `chain`
        file: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// Number of sampled periodicity checks per solution
        #[arg(long)]
        trials: Option<usize>,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn run(cli: Cli) -> anyhow::Result<Report> {
    match cli.command {
        Command::Partition(common) => finish(cmd_partition, RunConfig::resolve(&common, &ChainArgs::default())?),
        Command::Spectrum(common) => finish(cmd_spectrum, RunConfig::resolve(&common, &ChainArgs::default())?),
        Command::Chain { common, chain } => finish(cmd_chain, RunConfig::resolve(&common, &chain)?),
        Command::Verify { file, common, trials } => {
            let mut cfg = RunConfig::resolve(&common, &ChainArgs::default())?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            finish(|c| cmd_verify(c, &file), cfg)
        }
    }
}

fn finish(cmd: impl FnOnce(&RunConfig) -> anyhow::Result<Report>, cfg: RunConfig) -> anyhow::Result<Report> {
    let report = cmd(&cfg)?;
    for path in write_report(&report, cfg.out.as_deref())? {
        eprintln!("wrote {}", path.display());
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) if report.passed() => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_FAIL)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<cayley_spectra::Error>() {
                Some(cayley_spectra::Error::SolverFailure { .. }) => ExitCode::from(EXIT_FAIL),
                _ => ExitCode::from(EXIT_CONFIG),
            }
        }
    }
}
