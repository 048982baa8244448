//! Single-hidden-layer feedforward network for one-step-ahead forecasting.

mod activation;
mod network;
mod train;

pub use activation::Activation;
pub use network::{init_weights, Architecture, Mlp, Parameters, MODEL_FORMAT, MODEL_VERSION};
pub use train::{
    restart_seed, select_best, train, train_multi_restart, StepScaling, TrainConfig, TrainOutcome,
    TrainResult,
};
