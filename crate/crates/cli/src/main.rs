//! `npos-abc`: run committee rules and measures on election files.
//!
//! Exit codes: 0 on success, 1 for semantic errors (invalid elections,
//! unsupported options, missing inputs), 2 for malformed input files.

mod commands;
mod error;
mod manifest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "npos-abc",
    version,
    about = "Weighted approval-based committee elections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ElectionOverrides {
    /// Committee size, replacing the file's `k`.
    #[arg(long)]
    pub k: Option<usize>,
    /// Ballot cap, replacing the file's `ballot_cap`.
    #[arg(long)]
    pub ballot_cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an election file and list every violated invariant.
    Validate { path: PathBuf },

    /// Run rules and write committee and trace files.
    Run {
        /// Election file; omit when using --manifest.
        path: Option<PathBuf>,
        /// Comma-separated rule names.
        #[arg(long)]
        rule: Option<String>,
        #[command(flatten)]
        overrides: ElectionOverrides,
        #[arg(long)]
        allow_copies: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },

    /// Compute measures for a committee, given as a file or produced by --rule.
    Measure {
        path: Option<PathBuf>,
        #[arg(long)]
        committee: Option<PathBuf>,
        #[arg(long)]
        rule: Option<String>,
        #[command(flatten)]
        overrides: ElectionOverrides,
        #[arg(long)]
        allow_copies: bool,
        /// Comma-separated metric names (pav, satisfaction, jr, ejr+, minavg,
        /// census, priceability, minweight, mms, stake-lost, variance).
        #[arg(long)]
        metrics: Option<String>,
        /// Comma-separated ℓ values; defaults to 1..=k.
        #[arg(long)]
        l_grid: Option<String>,
        /// Seconds allowed per minimum-weight ILP.
        #[arg(long)]
        time_budget: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },

    /// Temporal, overlap and order statistics over a directory of elections.
    DatasetStats {
        dir: PathBuf,
        /// Rules whose committees are compared in the overlap matrix.
        #[arg(long, default_value = "seq-phragmen,mes")]
        rule: String,
        #[arg(long)]
        out: PathBuf,
    },

    /// Write a seeded random election file.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ballot_cap: usize,
        /// `uniform` or `pareto:<alpha>`.
        #[arg(long, default_value = "uniform")]
        weights: String,
        /// `impartial` or `clustered:<groups>`.
        #[arg(long, default_value = "impartial")]
        approvals: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Minimum cost of replacing ℓ winners with new candidates.
    ReplaceCost {
        path: PathBuf,
        #[arg(long)]
        rule: String,
        #[arg(long)]
        l_grid: Option<String>,
        #[command(flatten)]
        overrides: ElectionOverrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { path } => commands::validate(&path),
        Command::Run {
            path,
            rule,
            overrides,
            allow_copies,
            out,
            manifest,
        } => {
            let manifest = manifest::RunManifest::resolve(
                manifest.as_deref(),
                path,
                rule,
                overrides,
                allow_copies,
                out,
            )?;
            commands::run(&manifest)
        }
        Command::Measure {
            path,
            committee,
            rule,
            overrides,
            allow_copies,
            metrics,
            l_grid,
            time_budget,
            out,
            manifest,
        } => {
            let mut resolved = manifest::RunManifest::resolve(
                manifest.as_deref(),
                path,
                rule,
                overrides,
                allow_copies,
                out,
            )?;
            resolved.merge_measure_flags(committee, metrics, l_grid, time_budget)?;
            commands::measure(&resolved)
        }
        Command::DatasetStats { dir, rule, out } => commands::dataset_stats(&dir, &rule, &out),
        Command::Generate {
            n,
            m,
            k,
            ballot_cap,
            weights,
            approvals,
            seed,
            out,
        } => commands::generate(
            n,
            m,
            k,
            ballot_cap,
            &weights,
            &approvals,
            seed,
            out.as_deref(),
        ),
        Command::ReplaceCost {
            path,
            rule,
            l_grid,
            overrides,
            out,
        } => commands::replace_cost(&path, &rule, l_grid.as_deref(), &overrides, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
