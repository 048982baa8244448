//! `fxcast`: ingest series, train forecasting networks, run architecture
//! sweeps and render their reports.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fxcast::series::{ColumnSpec, HeaderMode};
use fxcast::ErrorClass;

#[derive(Parser, Debug)]
#[command(
    name = "fxcast",
    version,
    about = "Sliding-window neural forecasting of univariate series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a series file and print a summary.
    Ingest {
        path: PathBuf,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Generate a synthetic series file.
    Synth(commands::SynthArgs),
    /// Train one architecture and report in-sample and test accuracy.
    Train(commands::TrainArgs),
    /// Sweep input and hidden widths and write a report.
    Grid(commands::GridArgs),
    /// Render a table from a saved report.
    Report {
        path: PathBuf,
        #[arg(long, default_value = "in_sample")]
        view: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HeaderArg {
    Auto,
    Yes,
    No,
}

#[derive(Args, Debug, Clone)]
pub struct FormatArgs {
    /// Field delimiter (a single ASCII character).
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// Zero-based column holding the date.
    #[arg(long, default_value_t = 0)]
    date_col: usize,
    /// Zero-based column holding the value.
    #[arg(long, default_value_t = 1)]
    value_col: usize,
    #[arg(long, value_enum, default_value = "auto")]
    header: HeaderArg,
    #[arg(long, default_value = "%Y-%m-%d")]
    date_format: String,
}

impl FormatArgs {
    fn column_spec(&self) -> Result<ColumnSpec, CliError> {
        if !self.delimiter.is_ascii() {
            return Err(CliError::usage(
                "delimiter must be a single ASCII character",
            ));
        }
        Ok(ColumnSpec {
            delimiter: self.delimiter as u8,
            date_column: self.date_col,
            value_column: self.value_col,
            header: match self.header {
                HeaderArg::Auto => HeaderMode::Auto,
                HeaderArg::Yes => HeaderMode::Present,
                HeaderArg::No => HeaderMode::Absent,
            },
            date_format: self.date_format.clone(),
        })
    }
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    class: ErrorClass,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Usage,
            message: message.into(),
        }
    }

    pub fn new(class: ErrorClass, message: impl Into<String>) -> Self {
        Self {
            class,
            message: message.into(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self.class {
            ErrorClass::Usage => 2,
            ErrorClass::Data => 3,
            ErrorClass::Divergence => 4,
            ErrorClass::Io => 5,
        }
    }
}

impl From<fxcast::Error> for CliError {
    fn from(e: fxcast::Error) -> Self {
        Self::new(e.class(), e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest { path, format } => commands::ingest(&path, &format),
        Command::Synth(args) => commands::synth(&args),
        Command::Train(args) => commands::train(&args),
        Command::Grid(args) => commands::grid(&args),
        Command::Report { path, view } => commands::report(&path, &view),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit_code())
        }
    }
}
