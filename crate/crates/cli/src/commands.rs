use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use fxcast::experiment::{
    fit_cell, load_report, render_table, run_grid_with, synthesize_series, CellRecord, GridConfig,
    GridSink, ReportMeta, ReportWriter, SynthKind, TableView,
};
use fxcast::metrics::{evaluate_horizons, random_walk, HorizonSpec, MetricRow};
use fxcast::mlp::{StepScaling, TrainConfig};
use fxcast::series::{parse_series, split_by_count, TimeSeries};
use fxcast::ErrorClass;

use crate::{CliError, FormatArgs};

type Result<T> = std::result::Result<T, CliError>;

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::new(ErrorClass::Io, format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_error(path, e))
}

fn load_series(path: &Path, format: &FormatArgs) -> Result<TimeSeries<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let name = path.file_stem().map_or_else(
        || "series".to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    parse_series(&text, &format.column_spec()?, &name)
        .map_err(|e| CliError::new(e.class(), format!("{}: {e}", path.display())))
}

pub fn ingest(path: &Path, format: &FormatArgs) -> Result<()> {
    let s = load_series(path, format)?;
    println!(
        "{} observations, {}..{}, min {}, max {}",
        s.len(),
        s.first_date(),
        s.last_date(),
        s.min_value(),
        s.max_value()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// logistic_map, noisy_ar1 or sine.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "FXCAST_SEED", default_value_t = 0)]
    seed: u64,
    /// Logistic growth rate.
    #[arg(long)]
    r: Option<f64>,
    /// Logistic starting value.
    #[arg(long)]
    x0: Option<f64>,
    /// AR(1) coefficient.
    #[arg(long)]
    phi: Option<f64>,
    /// AR(1) noise half-width.
    #[arg(long)]
    sigma: Option<f64>,
    /// AR(1) starting value.
    #[arg(long)]
    y0: Option<f64>,
    /// Sine angular frequency per step.
    #[arg(long)]
    omega: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let mut kind: SynthKind = args.kind.parse()?;
    let mut unused = Vec::new();
    match &mut kind {
        SynthKind::LogisticMap { r, x0 } => {
            *r = args.r.unwrap_or(*r);
            *x0 = args.x0.unwrap_or(*x0);
            unused.extend([
                ("phi", args.phi),
                ("sigma", args.sigma),
                ("y0", args.y0),
                ("omega", args.omega),
            ]);
        }
        SynthKind::NoisyAr1 { phi, sigma, y0 } => {
            *phi = args.phi.unwrap_or(*phi);
            *sigma = args.sigma.unwrap_or(*sigma);
            *y0 = args.y0.unwrap_or(*y0);
            unused.extend([("r", args.r), ("x0", args.x0), ("omega", args.omega)]);
        }
        SynthKind::Sine { omega } => {
            *omega = args.omega.unwrap_or(*omega);
            unused.extend([
                ("r", args.r),
                ("x0", args.x0),
                ("phi", args.phi),
                ("sigma", args.sigma),
                ("y0", args.y0),
            ]);
        }
    }
    if let Some((flag, _)) = unused.iter().find(|(_, v)| v.is_some()) {
        return Err(CliError::usage(format!(
            "--{flag} does not apply to {}",
            kind.name()
        )));
    }
    let series = synthesize_series::<f64>(&kind, args.n, args.seed)?;
    match &args.out {
        Some(path) => series.write_csv(create(path)?).map_err(|e| match e {
            fxcast::Error::Io(io) => io_error(path, io),
            other => other.into(),
        }),
        None => Ok(series.write_csv(io::stdout().lock())?),
    }
}

/// Training and split options shared by `train` and `grid`.
#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Series file of `date,value` rows.
    data: PathBuf,
    #[command(flatten)]
    format: FormatArgs,
    /// Training observations, taken just before the test period. Defaults to
    /// everything before it.
    #[arg(long)]
    train_len: Option<usize>,
    /// Test observations at the end of the series.
    #[arg(long, default_value_t = 52)]
    test_len: usize,
    /// Random starts per architecture.
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    /// Master seed for weight initialisation.
    #[arg(long, env = "FXCAST_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    learning_rate: f64,
    #[arg(long, default_value_t = 2000)]
    max_epochs: usize,
    /// Stop once an epoch changes the SSE by less than this.
    #[arg(long, default_value_t = 1e-10)]
    min_sse_delta: f64,
    /// Initial weights are drawn from [-w, w].
    #[arg(long, default_value_t = 0.5)]
    init_half_width: f64,
    /// Step along the raw SSE gradient instead of its per-pattern mean.
    #[arg(long)]
    sum_step: bool,
    /// Evaluation horizons as label:length pairs.
    #[arg(long, default_value = "1m:4,6m:26,12m:52")]
    horizons: String,
    /// Train on raw values instead of scaling to [0, 1].
    #[arg(long)]
    no_scale: bool,
}

impl ExperimentArgs {
    fn split(&self) -> Result<(TimeSeries<f64>, TimeSeries<f64>)> {
        let series = load_series(&self.data, &self.format)?;
        let train_len = match self.train_len {
            Some(n) => n,
            None => series.len().checked_sub(self.test_len).ok_or_else(|| {
                CliError::usage(format!(
                    "--test-len {} exceeds the {} observations in the series",
                    self.test_len,
                    series.len()
                ))
            })?,
        };
        Ok(split_by_count(&series, train_len, self.test_len)?)
    }

    fn grid_config(&self, inputs: Vec<usize>, hidden: Vec<usize>) -> Result<GridConfig<f64>> {
        let horizons: HorizonSpec = self.horizons.parse()?;
        let cfg = GridConfig {
            input_levels: inputs,
            hidden_levels: hidden,
            train: TrainConfig {
                learning_rate: self.learning_rate,
                max_epochs: self.max_epochs,
                min_sse_delta: self.min_sse_delta,
                restarts: self.restarts,
                init_half_width: self.init_half_width,
                master_seed: self.seed,
                step_scaling: if self.sum_step {
                    StepScaling::Sum
                } else {
                    StepScaling::PerPattern
                },
            },
            horizons,
            scale: !self.no_scale,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Input window length.
    #[arg(long)]
    inputs: usize,
    /// Hidden nodes.
    #[arg(long)]
    hidden: usize,
    /// Where to write the trained network.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn metric_line(label: &str, model: &str, row: &MetricRow<f64>) -> String {
    format!(
        "{label:<8}{model:<6}{:>14.8}{:>14.8}{:>14.8}",
        row.rmse, row.mae, row.mape
    )
}

pub fn train(args: &TrainArgs) -> Result<()> {
    if args.inputs == 0 || args.hidden == 0 {
        return Err(CliError::usage("--inputs and --hidden must be at least 1"));
    }
    let cfg = args
        .common
        .grid_config(vec![args.inputs], vec![args.hidden])?;
    let (train, test) = args.common.split()?;
    let fit = fit_cell(&train, &test, args.inputs, args.hidden, &cfg)?;
    let rw = random_walk(train.last_value(), test.values())?;
    let rw_rows = evaluate_horizons(&rw, &cfg.horizons)?;
    let r = &fit.result;

    println!(
        "train {} obs ({}..{}), test {} obs ({}..{})",
        train.len(),
        train.first_date(),
        train.last_date(),
        test.len(),
        test.first_date(),
        test.last_date()
    );
    println!(
        "inputs {} hidden {} restarts {} seed {}: best restart {}, SSE {:.8}, {} epochs",
        r.inputs,
        r.hidden,
        cfg.train.restarts,
        cfg.train.master_seed,
        r.best_restart,
        r.best_sse,
        r.epochs_run
    );
    println!(
        "{:<8}{:<6}{:>14}{:>14}{:>14}",
        "Horizon", "Model", "RMSE", "MAE", "MAPE"
    );
    println!("{}", metric_line("in", "NN", &r.in_sample));
    for (nn, (label, rw)) in r.out_sample.iter().zip(&rw_rows) {
        println!("{}", metric_line(label, "NN", &nn.metrics));
        println!("{}", metric_line(label, "RW", rw));
    }

    if let Some(path) = &args.out {
        let mut out = create(path)?;
        fit.net
            .save(fit.scaler.as_ref(), &mut out)
            .map_err(|e| match e {
                fxcast::Error::Io(io) => io_error(path, io),
                other => other.into(),
            })?;
        eprintln!("model written to {}", path.display());
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Input levels, e.g. `1..10` or `1,2,4`.
    #[arg(long, default_value = "1..10")]
    inputs: String,
    /// Hidden levels, e.g. `6,12,18,24,30` or `2..4`.
    #[arg(long, default_value = "6,12,18,24,30")]
    hidden: String,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Report file, written one cell at a time.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `a..b` / `a..=b` (inclusive) or a comma-separated list.
pub fn parse_levels(text: &str) -> std::result::Result<Vec<usize>, String> {
    let text = text.trim();
    let number = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad level {s:?} in {text:?}"))
    };
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (number(lo)?, number(hi.trim_start_matches('='))?);
        if lo > hi {
            return Err(format!("empty range {text:?}"));
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',').map(number).collect()
}

struct Progress<'a, W> {
    writer: Option<ReportWriter<W>>,
    path: Option<&'a Path>,
    done: usize,
    total: usize,
}

impl<W: Write> GridSink<f64> for Progress<'_, W> {
    fn begin(&mut self, meta: &ReportMeta<f64>) -> fxcast::Result<()> {
        match &mut self.writer {
            Some(w) => w.begin(meta),
            None => Ok(()),
        }
    }

    fn cell(&mut self, record: &CellRecord<f64>) -> fxcast::Result<()> {
        self.done += 1;
        let (p, h) = record.key();
        match record {
            CellRecord::Ok(c) => eprintln!(
                "[{}/{}] inputs {p} hidden {h}: SSE {:.6} ({:.1}s)",
                self.done, self.total, c.best_sse, c.train_seconds
            ),
            CellRecord::Failed(f) => {
                eprintln!(
                    "[{}/{}] inputs {p} hidden {h}: FAILED {}",
                    self.done, self.total, f.error
                )
            }
        }
        match &mut self.writer {
            Some(w) => w.cell(record),
            None => Ok(()),
        }
    }
}

pub fn grid(args: &GridArgs) -> Result<()> {
    let inputs = parse_levels(&args.inputs).map_err(CliError::usage)?;
    let hidden = parse_levels(&args.hidden).map_err(CliError::usage)?;
    if args.workers == Some(0) {
        return Err(CliError::usage("--workers must be at least 1"));
    }
    let cfg = args.common.grid_config(inputs, hidden)?;
    let (train, test) = args.common.split()?;
    let workers = args
        .workers
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()));

    let writer = match &args.out {
        Some(path) => Some(ReportWriter::new(create(path)?)),
        None => None,
    };
    let mut progress = Progress {
        writer,
        path: args.out.as_deref(),
        done: 0,
        total: cfg.cells().len(),
    };
    let report =
        run_grid_with(&train, &test, &cfg, workers, &mut progress).map_err(|e| {
            match (e, progress.path) {
                (fxcast::Error::Io(io), Some(path)) => io_error(path, io),
                (other, _) => other.into(),
            }
        })?;

    let mut stdout = io::stdout().lock();
    for view in [
        TableView::InSample,
        TableView::OutSampleByInput,
        TableView::HiddenEffect,
    ] {
        writeln!(stdout, "{}", render_table(&report, view))
            .map_err(|e| CliError::new(ErrorClass::Io, e.to_string()))?;
    }
    let failed = report.failed_count();
    if failed == report.cells.len() {
        return Err(CliError::new(
            ErrorClass::Divergence,
            format!("all {failed} cells failed"),
        ));
    }
    if failed > 0 {
        eprintln!("{failed} of {} cells failed", report.cells.len());
    }
    Ok(())
}

pub fn report(path: &Path, view: &str) -> Result<()> {
    let view: TableView = view.parse()?;
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let report = load_report::<f64, _>(io::BufReader::new(file))
        .map_err(|e| CliError::new(e.class(), format!("{}: {e}", path.display())))?;
    print!("{}", render_table(&report, view));
    Ok(())
}
