//! Command-line front end. `main.rs` parses arguments and calls [`run`].

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "growai", version, about = "GROW-AI evaluation harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rubric registry
    #[command(subcommand)]
    Rubric(RubricCommand),
    /// Validate an AI Journal (exit 2 = schema error, 3 = invariant error)
    ValidateJournal {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Score one evaluator's sheet
    Score(ScoreArgs),
    /// Weight calibration
    #[command(subcommand)]
    Weights(WeightsCommand),
    /// Multi-evaluator campaigns stored in a directory
    #[command(subcommand)]
    Campaign(CampaignCommand),
    /// Render a finalized campaign (exit 4 if not finalized)
    Report {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormatArg::Md)]
        format: ReportFormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Journals whose evidence coverage is listed per criterion
        #[arg(long)]
        journal: Vec<PathBuf>,
    },
    /// Run the HTTP session service
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        #[arg(long)]
        data_dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum RubricCommand {
    /// Print the versioned rubric document
    Dump {
        /// Weights file; criteria not listed keep the prior weights
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub sheet: PathBuf,
    /// Journal of the run; its gate events are applied with the sheet's
    #[arg(long)]
    pub journal: Option<PathBuf>,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum WeightsCommand {
    /// Weights from a pairwise comparison matrix
    Ahp {
        #[arg(long)]
        matrix: PathBuf,
        /// Also round to integer hundredths for this criterion
        #[arg(long)]
        criterion: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Least-squares weights from calibration observations
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        criterion: String,
        /// `default` or a weights file
        #[arg(long, default_value = "default")]
        prior: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Monte Carlo random consistency index
    DeriveRi {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Subcommand)]
pub enum CampaignCommand {
    /// Create an empty campaign directory
    Init {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        entity_id: String,
        #[arg(long, default_value = "software_agent")]
        entity_kind: String,
        /// Defaults to the directory name
        #[arg(long)]
        campaign_id: Option<String>,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Score a sheet (or take a scored run) and append it
    AddRun {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, conflicts_with = "run", required_unless_present = "run")]
        sheet: Option<PathBuf>,
        #[arg(long, requires = "sheet")]
        journal: Option<PathBuf>,
        /// A RunResult written by `growai score --format json`
        #[arg(long)]
        run: Option<PathBuf>,
    },
    /// Aggregate the runs and freeze the campaign
    Finalize {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Campaign summary
    Show {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormatArg {
    Md,
    Json,
}

/// Runs one command, writing its primary output to stdout.
pub fn run(cli: Cli) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    commands::dispatch(cli.command, &mut out)
}

/// Runs `cli` and prints any failure to stderr.
pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
