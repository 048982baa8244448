use chrono::NaiveDate;
use thiserror::Error;

use crate::mlp::Activation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("row {row}: value is not finite")]
    NonFiniteValue { row: usize },
    #[error("row {row}: date {date} does not follow {previous}")]
    DateOrder {
        row: usize,
        date: NaiveDate,
        previous: NaiveDate,
    },
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("window length must be at least 1")]
    ZeroWindow,
    #[error(
        "too few observations: window length {window} needs more than {window} values, got {len}"
    )]
    TooFewObservations { window: usize, len: usize },
    #[error("split of {train} + {test} observations does not fit a series of {len}")]
    SplitOutOfRange {
        train: usize,
        test: usize,
        len: usize,
    },
    #[error("cannot scale a constant series (all values equal {0})")]
    ConstantSeries(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("activation {0} has no usable derivative")]
    NonDifferentiable(Activation),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("all {restarts} restarts diverged")]
    AllRestartsDiverged { restarts: usize },
    #[error("invalid forecast set: {0}")]
    InvalidForecast(String),
    #[error("actual value at position {0} is zero; MAPE is undefined")]
    ZeroActual(usize),
    #[error("horizon {label} needs {len} forecasts but only {available} exist")]
    HorizonTooLong {
        label: String,
        len: usize,
        available: usize,
    },
    #[error("unknown table view {0:?}")]
    UnknownView(String),
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt payload: {0}")]
    Corrupt(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse failure class, used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Divergence,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) => ErrorClass::Io,
            Error::AllRestartsDiverged { .. } => ErrorClass::Divergence,
            Error::ZeroWindow
            | Error::InvalidConfig(_)
            | Error::InvalidParameter(_)
            | Error::UnknownView(_)
            | Error::NonDifferentiable(_)
            | Error::SplitOutOfRange { .. } => ErrorClass::Usage,
            _ => ErrorClass::Data,
        }
    }
}
