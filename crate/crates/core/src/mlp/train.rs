use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{init_weights, Architecture, Mlp};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::WindowedDataset;

/// How the SSE gradient is scaled before a descent step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepScaling {
    /// Step along the gradient divided by the pattern count, so a learning
    /// rate behaves the same for short and long training windows.
    #[default]
    PerPattern,
    /// Step along the raw SSE gradient.
    Sum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig<T> {
    pub learning_rate: T,
    pub max_epochs: usize,
    /// Training stops once an epoch changes the SSE by less than this.
    pub min_sse_delta: T,
    pub restarts: usize,
    pub init_half_width: T,
    pub master_seed: u64,
    #[serde(default)]
    pub step_scaling: StepScaling,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            learning_rate: T::of(0.05),
            max_epochs: 2000,
            min_sse_delta: T::of(1e-10),
            restarts: 50,
            init_half_width: T::of(0.5),
            master_seed: 0,
            step_scaling: StepScaling::PerPattern,
        }
    }
}

impl<T: Scalar> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.learning_rate > T::zero() && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive and finite");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1");
        }
        if self.min_sse_delta.is_nan() || self.min_sse_delta < T::zero() {
            return bad("min_sse_delta must be nonnegative");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if !(self.init_half_width > T::zero() && self.init_half_width.is_finite()) {
            return bad("init_half_width must be positive and finite");
        }
        Ok(())
    }
}

/// Result of one gradient-descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome<T> {
    /// Final parameters, or the last finite ones if training diverged.
    pub net: Mlp<T>,
    /// SSE of `net` on the training data.
    pub sse: T,
    /// SSE after each completed epoch.
    pub sse_trace: Vec<T>,
    pub epochs_run: usize,
    pub diverged: bool,
}

/// Full-batch gradient descent on the SSE.
///
/// Each epoch takes one step against the gradient. Training stops after
/// `max_epochs`, or as soon as an epoch changes the SSE by less than
/// `min_sse_delta`. If a step produces a non-finite parameter or SSE, the
/// step is discarded and the outcome is flagged as diverged.
pub fn train<T: Scalar>(
    net0: &Mlp<T>,
    data: &WindowedDataset<T>,
    cfg: &TrainConfig<T>,
) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let step = match cfg.step_scaling {
        StepScaling::PerPattern => cfg.learning_rate / T::from_count(data.len()),
        StepScaling::Sum => cfg.learning_rate,
    };

    let mut net = net0.clone();
    let (mut sse, mut grad) = net.sse_and_gradient(data)?;
    if !sse.is_finite() {
        return Ok(TrainOutcome {
            net,
            sse,
            sse_trace: Vec::new(),
            epochs_run: 0,
            diverged: true,
        });
    }
    let mut trace = Vec::new();
    let mut diverged = false;
    for _ in 0..cfg.max_epochs {
        let mut params = net.params().clone();
        params.add_scaled(-step, &grad);
        if !params.is_finite() {
            diverged = true;
            break;
        }
        let candidate = Mlp::new(*net.arch(), params)?;
        let (next_sse, next_grad) = candidate.sse_and_gradient(data)?;
        if !next_sse.is_finite() {
            diverged = true;
            break;
        }
        let change = (sse - next_sse).abs();
        net = candidate;
        sse = next_sse;
        grad = next_grad;
        trace.push(sse);
        if change < cfg.min_sse_delta {
            break;
        }
    }
    Ok(TrainOutcome {
        net,
        sse,
        epochs_run: trace.len(),
        sse_trace: trace,
        diverged,
    })
}

/// Best of several independently initialised training runs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult<T> {
    pub best_net: Mlp<T>,
    pub best_sse: T,
    pub best_restart_index: usize,
    pub epochs_run: usize,
    /// Per-epoch SSE of the best restart.
    pub sse_trace: Vec<T>,
    /// Final SSE of every restart in index order; `None` where it diverged.
    pub restart_sses: Vec<Option<T>>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Initialisation seed of one restart. Depends only on its arguments, so the
/// schedule that runs restarts cannot change which weights each one gets.
pub fn restart_seed(master_seed: u64, inputs: usize, hidden: usize, restart: usize) -> u64 {
    [inputs as u64, hidden as u64, restart as u64]
        .into_iter()
        .fold(splitmix64(master_seed), |acc, v| splitmix64(acc ^ v))
}

/// Index of the smallest SSE, skipping diverged (`None`) entries; the
/// lowest index wins ties.
pub fn select_best<T: Scalar>(sses: &[Option<T>]) -> Option<usize> {
    sses.iter()
        .enumerate()
        .filter_map(|(k, s)| s.map(|s| (k, s)))
        .fold(None, |best: Option<(usize, T)>, (k, s)| match best {
            Some((_, b)) if b <= s => best,
            _ => Some((k, s)),
        })
        .map(|(k, _)| k)
}

/// Trains `cfg.restarts` networks from seed-derived initial weights and keeps
/// the one with the smallest final SSE. Diverged restarts are skipped; ties go
/// to the lowest restart index.
///
/// Restarts run on the ambient rayon pool.
pub fn train_multi_restart<T: Scalar>(
    arch: Architecture,
    data: &WindowedDataset<T>,
    cfg: &TrainConfig<T>,
) -> Result<TrainResult<T>> {
    cfg.validate()?;
    arch.check_differentiable()?;
    let outcomes: Vec<TrainOutcome<T>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let seed = restart_seed(cfg.master_seed, arch.inputs, arch.hidden, k);
            train(&init_weights(arch, seed, cfg.init_half_width), data, cfg)
        })
        .collect::<Result<_>>()?;

    let restart_sses: Vec<Option<T>> = outcomes
        .iter()
        .map(|o| (!o.diverged).then_some(o.sse))
        .collect();
    let Some(index) = select_best(&restart_sses) else {
        return Err(Error::AllRestartsDiverged {
            restarts: cfg.restarts,
        });
    };
    let winner = outcomes.into_iter().nth(index).expect("index in range");
    Ok(TrainResult {
        best_net: winner.net,
        best_sse: winner.sse,
        best_restart_index: index,
        epochs_run: winner.epochs_run,
        sse_trace: winner.sse_trace,
        restart_sses,
    })
}
