use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{evaluate_horizons, random_walk, ForecastSet, HorizonSpec, MetricRow};
use crate::mlp::{train_multi_restart, Architecture, Mlp, TrainConfig};
use crate::scalar::Scalar;
use crate::series::{Scaler, TimeSeries, WindowedDataset};

/// Architecture sweep settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig<T> {
    pub input_levels: Vec<usize>,
    pub hidden_levels: Vec<usize>,
    pub train: TrainConfig<T>,
    pub horizons: HorizonSpec,
    /// Min-max scale to `[0, 1]` using the training split before fitting.
    pub scale: bool,
}

impl<T: Scalar> Default for GridConfig<T> {
    fn default() -> Self {
        Self {
            input_levels: (1..=10).collect(),
            hidden_levels: vec![6, 12, 18, 24, 30],
            train: TrainConfig::default(),
            horizons: HorizonSpec::default(),
            scale: true,
        }
    }
}

impl<T: Scalar> GridConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (what, levels) in [
            ("input", &self.input_levels),
            ("hidden", &self.hidden_levels),
        ] {
            if levels.is_empty() {
                return Err(Error::InvalidConfig(format!("no {what} levels")));
            }
            if levels[0] == 0 || levels.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidConfig(format!(
                    "{what} levels must be positive and strictly increasing"
                )));
            }
        }
        self.train.validate()
    }

    /// `(inputs, hidden)` pairs in report order.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        self.input_levels
            .iter()
            .flat_map(|&p| self.hidden_levels.iter().map(move |&h| (p, h)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonMetrics<T> {
    pub label: String,
    pub metrics: MetricRow<T>,
}

fn label_rows<T>(rows: Vec<(String, MetricRow<T>)>) -> Vec<HorizonMetrics<T>> {
    rows.into_iter()
        .map(|(label, metrics)| HorizonMetrics { label, metrics })
        .collect()
}

/// Outcome of training and evaluating one architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult<T> {
    pub inputs: usize,
    pub hidden: usize,
    pub in_sample: MetricRow<T>,
    pub out_sample: Vec<HorizonMetrics<T>>,
    pub best_sse: T,
    pub best_restart: usize,
    pub epochs_run: usize,
    /// Wall-clock time. Not persisted, so report files stay reproducible.
    #[serde(skip)]
    pub train_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellFailure {
    pub inputs: usize,
    pub hidden: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellRecord<T> {
    Ok(CellResult<T>),
    Failed(CellFailure),
}

impl<T> CellRecord<T> {
    pub fn key(&self) -> (usize, usize) {
        match self {
            CellRecord::Ok(c) => (c.inputs, c.hidden),
            CellRecord::Failed(f) => (f.inputs, f.hidden),
        }
    }

    pub fn result(&self) -> Option<&CellResult<T>> {
        match self {
            CellRecord::Ok(c) => Some(c),
            CellRecord::Failed(_) => None,
        }
    }
}

/// Input windows used for one-step-ahead forecasts of a test period that
/// directly follows `train_len` training values. Forecast `t` reads the `p`
/// observations just before position `train_len + t` of the joined series.
pub fn forecast_input_ranges(
    train_len: usize,
    test_len: usize,
    p: usize,
) -> impl Iterator<Item = Range<usize>> {
    assert!(p <= train_len, "window longer than training history");
    (0..test_len).map(move |t| train_len + t - p..train_len + t)
}

/// One-step-ahead forecasts over `test`, always fed actual observations
/// (never earlier forecasts). Inputs and outputs are in original units;
/// `scaler` maps them to and from the network's space.
pub fn one_step_forecasts<T: Scalar>(
    net: &Mlp<T>,
    scaler: Option<&Scaler<T>>,
    history: &[T],
    test: &[T],
) -> Result<Vec<T>> {
    let p = net.arch().inputs;
    if p > history.len() {
        return Err(Error::TooFewObservations {
            window: p,
            len: history.len(),
        });
    }
    let joined: Vec<T> = history
        .iter()
        .chain(test)
        .map(|&v| scaler.map_or(v, |s| s.apply(v)))
        .collect();
    forecast_input_ranges(history.len(), test.len(), p)
        .map(|r| {
            let y = net.forward(&joined[r])?;
            Ok(scaler.map_or(y, |s| s.invert(y)))
        })
        .collect()
}

/// Trains one `(p, h)` architecture on `train` and evaluates it in-sample
/// and over each test horizon.
pub fn run_cell<T: Scalar>(
    train: &TimeSeries<T>,
    test: &TimeSeries<T>,
    p: usize,
    h: usize,
    cfg: &GridConfig<T>,
) -> Result<CellResult<T>> {
    fit_cell(train, test, p, h, cfg).map(|fit| fit.result)
}

/// A cell's metrics together with the network that produced them.
#[derive(Debug, Clone)]
pub struct CellFit<T> {
    pub result: CellResult<T>,
    pub net: Mlp<T>,
    /// Maps original units to the network's space; `None` when unscaled.
    pub scaler: Option<Scaler<T>>,
}

/// [`run_cell`], keeping the trained network.
pub fn fit_cell<T: Scalar>(
    train: &TimeSeries<T>,
    test: &TimeSeries<T>,
    p: usize,
    h: usize,
    cfg: &GridConfig<T>,
) -> Result<CellFit<T>> {
    let started = Instant::now();
    let arch = Architecture::new(p, h)?;
    let scaler = if cfg.scale {
        Some(Scaler::fit(train)?)
    } else {
        None
    };
    let model_space: Vec<T> = match &scaler {
        Some(s) => s.apply_all(train.values()),
        None => train.values().to_vec(),
    };
    let data = WindowedDataset::from_values(&model_space, p)?;
    let fit = train_multi_restart(arch, &data, &cfg.train)?;

    let fitted = fit
        .best_net
        .predict(&data)?
        .into_iter()
        .map(|y| scaler.map_or(y, |s| s.invert(y)))
        .collect();
    let in_sample = MetricRow::compute(&ForecastSet::new(train.values()[p..].to_vec(), fitted)?)?;

    let predicted = one_step_forecasts(
        &fit.best_net,
        scaler.as_ref(),
        train.values(),
        test.values(),
    )?;
    let out = ForecastSet::new(test.values().to_vec(), predicted)?;
    let out_sample = label_rows(evaluate_horizons(&out, &cfg.horizons)?);

    let result = CellResult {
        inputs: p,
        hidden: h,
        in_sample,
        out_sample,
        best_sse: fit.best_sse,
        best_restart: fit.best_restart_index,
        epochs_run: fit.epochs_run,
        train_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(CellFit {
        result,
        net: fit.best_net,
        scaler,
    })
}

/// Everything about a sweep that is known before any cell runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta<T> {
    /// Label of the training sample, e.g. the series name.
    pub sample: String,
    pub master_seed: u64,
    pub train_len: usize,
    pub test_len: usize,
    pub config: GridConfig<T>,
    pub random_walk: Vec<HorizonMetrics<T>>,
}

/// Hidden-level averages for one input level.
#[derive(Debug, Clone, PartialEq)]
pub struct InputAverage<T> {
    pub inputs: usize,
    /// Number of successful cells averaged; zero when every cell failed.
    pub cells: usize,
    pub in_sample: Option<MetricRow<T>>,
    pub out_sample: Vec<HorizonMetrics<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport<T> {
    pub meta: ReportMeta<T>,
    /// Sorted by `(inputs, hidden)`.
    pub cells: Vec<CellRecord<T>>,
    pub per_input_averages: Vec<InputAverage<T>>,
}

impl<T: Scalar> GridReport<T> {
    pub fn new(meta: ReportMeta<T>, mut cells: Vec<CellRecord<T>>) -> Self {
        cells.sort_by_key(CellRecord::key);
        let per_input_averages = input_averages(&meta.config, &cells);
        Self {
            meta,
            cells,
            per_input_averages,
        }
    }

    pub fn successful(&self) -> impl Iterator<Item = &CellResult<T>> {
        self.cells.iter().filter_map(CellRecord::result)
    }

    pub fn failed_count(&self) -> usize {
        self.cells.len() - self.successful().count()
    }

    /// Zeroes wall-clock timings, which are not part of the persisted form.
    pub fn without_timings(mut self) -> Self {
        for cell in &mut self.cells {
            if let CellRecord::Ok(c) = cell {
                c.train_seconds = 0.0;
            }
        }
        self
    }
}

/// Means over the hidden levels of each input level, skipping failed cells.
pub fn input_averages<T: Scalar>(
    config: &GridConfig<T>,
    cells: &[CellRecord<T>],
) -> Vec<InputAverage<T>> {
    config
        .input_levels
        .iter()
        .map(|&p| {
            let group: Vec<&CellResult<T>> = cells
                .iter()
                .filter_map(CellRecord::result)
                .filter(|c| c.inputs == p)
                .collect();
            if group.is_empty() {
                return InputAverage {
                    inputs: p,
                    cells: 0,
                    in_sample: None,
                    out_sample: Vec::new(),
                };
            }
            let in_rows: Vec<_> = group.iter().map(|c| c.in_sample).collect();
            let out_sample = config
                .horizons
                .windows()
                .iter()
                .enumerate()
                .map(|(k, w)| {
                    let rows: Vec<_> = group.iter().map(|c| c.out_sample[k].metrics).collect();
                    HorizonMetrics {
                        label: w.label.clone(),
                        metrics: MetricRow::mean(&rows),
                    }
                })
                .collect();
            InputAverage {
                inputs: p,
                cells: group.len(),
                in_sample: Some(MetricRow::mean(&in_rows)),
                out_sample,
            }
        })
        .collect()
}

/// Receives a sweep's results as they become available.
pub trait GridSink<T> {
    fn begin(&mut self, meta: &ReportMeta<T>) -> Result<()>;
    /// Called once per cell, in `(inputs, hidden)` order.
    fn cell(&mut self, record: &CellRecord<T>) -> Result<()>;
}

impl<T> GridSink<T> for () {
    fn begin(&mut self, _: &ReportMeta<T>) -> Result<()> {
        Ok(())
    }

    fn cell(&mut self, _: &CellRecord<T>) -> Result<()> {
        Ok(())
    }
}

/// Runs every cell of the grid on the default rayon pool.
pub fn run_grid<T: Scalar>(
    train: &TimeSeries<T>,
    test: &TimeSeries<T>,
    grid: &GridConfig<T>,
) -> Result<GridReport<T>> {
    run_grid_with(train, test, grid, None, &mut ())
}

/// Runs every cell of the grid with at most `workers` threads (machine
/// parallelism when `None`), streaming results to `sink` in cell order.
///
/// A cell that fails is recorded as failed; the other cells still run. The
/// report does not depend on `workers` or on scheduling.
pub fn run_grid_with<T: Scalar>(
    train: &TimeSeries<T>,
    test: &TimeSeries<T>,
    grid: &GridConfig<T>,
    workers: Option<usize>,
    sink: &mut dyn GridSink<T>,
) -> Result<GridReport<T>> {
    grid.validate()?;
    let rw = random_walk(train.last_value(), test.values())?;
    let meta = ReportMeta {
        sample: train.name().to_string(),
        master_seed: grid.train.master_seed,
        train_len: train.len(),
        test_len: test.len(),
        config: grid.clone(),
        random_walk: label_rows(evaluate_horizons(&rw, &grid.horizons)?),
    };
    sink.begin(&meta)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let cells = grid.cells();
    let cancelled = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(usize, CellRecord<T>)>();

    let records = std::thread::scope(|scope| -> Result<Vec<CellRecord<T>>> {
        let cells = &cells;
        let cancelled = &cancelled;
        scope.spawn(move || {
            pool.install(|| {
                cells
                    .par_iter()
                    .enumerate()
                    .for_each_with(tx, |tx, (i, &(p, h))| {
                        if cancelled.load(Ordering::Relaxed) {
                            return;
                        }
                        let record = match run_cell(train, test, p, h, grid) {
                            Ok(c) => CellRecord::Ok(c),
                            Err(e) => CellRecord::Failed(CellFailure {
                                inputs: p,
                                hidden: h,
                                error: e.to_string(),
                            }),
                        };
                        let _ = tx.send((i, record));
                    });
            });
        });

        let mut pending = BTreeMap::new();
        let mut ordered = Vec::with_capacity(cells.len());
        for (i, record) in rx {
            pending.insert(i, record);
            while let Some(record) = pending.remove(&ordered.len()) {
                if let Err(e) = sink.cell(&record) {
                    cancelled.store(true, Ordering::Relaxed);
                    return Err(e);
                }
                ordered.push(record);
            }
        }
        Ok(ordered)
    })?;

    Ok(GridReport::new(meta, records))
}
