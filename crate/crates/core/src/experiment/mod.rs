//! Architecture sweeps over input and hidden widths, their reports, and
//! synthetic benchmark series.

mod grid;
mod render;
mod report;
mod synth;

pub use grid::{
    fit_cell, forecast_input_ranges, input_averages, one_step_forecasts, run_cell, run_grid,
    run_grid_with, CellFailure, CellFit, CellRecord, CellResult, GridConfig, GridReport, GridSink,
    HorizonMetrics, InputAverage, ReportMeta,
};
pub use render::{render_hidden_effect, render_table, HiddenEffectSample, TableView};
pub use report::{
    load_partial_report, load_report, save_report, ReportWriter, REPORT_FORMAT, REPORT_VERSION,
};
pub use synth::{synthesize_series, synthetic_epoch, SynthKind};
