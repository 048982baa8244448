//! Sliding-window neural forecasting of univariate series.
//!
//! A series is split by count into training and test periods, min-max
//! scaled on the training period, and turned into lagged input windows. For
//! each `(inputs, hidden)` architecture a single-hidden-layer network is
//! trained by full-batch gradient descent on the sum of squared errors from
//! many random starts, keeping the best. Networks are scored in-sample and
//! on one-step-ahead test forecasts with RMSE, MAE and MAPE over several
//! horizons, next to a random-walk benchmark.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which the command-line tool uses.

pub mod error;
pub mod experiment;
pub mod metrics;
pub mod mlp;
pub mod scalar;
pub mod series;

pub use error::{Error, ErrorClass, Result};
pub use scalar::Scalar;

pub type TimeSeries = series::TimeSeries<f64>;
pub type WindowedDataset = series::WindowedDataset<f64>;
pub type Scaler = series::Scaler<f64>;
pub type Mlp = mlp::Mlp<f64>;
pub type Parameters = mlp::Parameters<f64>;
pub type TrainConfig = mlp::TrainConfig<f64>;
pub type TrainResult = mlp::TrainResult<f64>;
pub type ForecastSet = metrics::ForecastSet<f64>;
pub type MetricRow = metrics::MetricRow<f64>;
pub type GridConfig = experiment::GridConfig<f64>;
pub type GridReport = experiment::GridReport<f64>;
pub type CellResult = experiment::CellResult<f64>;

pub type TimeSeries32 = series::TimeSeries<f32>;
pub type Mlp32 = mlp::Mlp<f32>;
pub type TrainConfig32 = mlp::TrainConfig<f32>;
