//! Plain-text tables shaped like the usual input/hidden-node study layout.

use std::fmt::Write;
use std::str::FromStr;

use super::grid::{CellRecord, GridReport};
use crate::error::{Error, Result};
use crate::metrics::MetricRow;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableView {
    /// Training fit per cell with an average row per input level.
    InSample,
    /// Hidden-averaged test metrics per input level and horizon, closed by
    /// the random-walk row.
    OutSampleByInput,
    /// Test metrics of every cell per horizon, labelled by sample.
    HiddenEffect,
}

impl FromStr for TableView {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in_sample" => Ok(TableView::InSample),
            "out_sample" | "out_sample_by_input" => Ok(TableView::OutSampleByInput),
            "hidden_effect" => Ok(TableView::HiddenEffect),
            other => Err(Error::UnknownView(other.to_string())),
        }
    }
}

const LABEL: usize = 7;
const NUMBER: usize = 14;

/// Left-aligned label column, always followed by a space.
fn lab(s: impl std::fmt::Display) -> String {
    format!("{s:<LABEL$} ")
}

fn num<T: Scalar>(v: T) -> String {
    format!("{:.8}", v.as_f64())
}

fn metric_cols<T: Scalar>(row: &MetricRow<T>) -> String {
    format!(
        "{:>w$}{:>w$}{:>w$}",
        num(row.rmse),
        num(row.mae),
        num(row.mape),
        w = NUMBER
    )
}

fn header(labels: &[&str], metrics: [&str; 3]) -> String {
    let mut line = String::new();
    for l in labels {
        line.push_str(&lab(l));
    }
    for m in metrics {
        let _ = write!(line, "{m:>NUMBER$}");
    }
    line
}

fn horizon_names(k: usize) -> [String; 3] {
    ["RMSE", "MAE", "MAPE"].map(|m| format!("{m}{k}"))
}

pub fn render_table<T: Scalar>(report: &GridReport<T>, view: TableView) -> String {
    match view {
        TableView::InSample => render_in_sample(report),
        TableView::OutSampleByInput => render_out_sample(report),
        TableView::HiddenEffect => render_hidden_effect(&[HiddenEffectSample {
            label: &report.meta.sample,
            report,
            inputs: None,
        }]),
    }
}

fn render_in_sample<T: Scalar>(report: &GridReport<T>) -> String {
    let mut out = header(&["Input", "Hidden"], ["RMSE", "MAE", "MAPE"]);
    out.push('\n');
    for avg in &report.per_input_averages {
        for cell in report.cells.iter().filter(|c| c.key().0 == avg.inputs) {
            let (p, h) = cell.key();
            let body = match cell {
                CellRecord::Ok(c) => metric_cols(&c.in_sample),
                CellRecord::Failed(f) => format!("  FAILED: {}", f.error),
            };
            let _ = writeln!(out, "{}{}{body}", lab(p), lab(h));
        }
        let body = match &avg.in_sample {
            Some(row) => metric_cols(row),
            None => "  n/a".to_string(),
        };
        let _ = writeln!(out, "{}{}{body}", lab("Avgr"), lab(""));
    }
    out
}

fn render_out_sample<T: Scalar>(report: &GridReport<T>) -> String {
    let mut blocks = Vec::new();
    for (k, rw) in report.meta.random_walk.iter().enumerate() {
        let names = horizon_names(k + 1);
        let mut block = header(&["Input"], [&names[0], &names[1], &names[2]]);
        block.push('\n');
        for avg in &report.per_input_averages {
            let body = match avg.out_sample.get(k) {
                Some(h) => metric_cols(&h.metrics),
                None => "  n/a".to_string(),
            };
            let _ = writeln!(block, "{}{body}", lab(avg.inputs));
        }
        let _ = writeln!(block, "{}{}", lab("RW"), metric_cols(&rw.metrics));
        blocks.push(block);
    }
    blocks.join("\n")
}

/// One sample's contribution to the hidden-node comparison table.
pub struct HiddenEffectSample<'a, T> {
    pub label: &'a str,
    pub report: &'a GridReport<T>,
    /// Restrict to one input level; all levels when `None`.
    pub inputs: Option<usize>,
}

/// Per-horizon tables of `(sample, input, hidden)` rows, so samples trained
/// on different series or lengths can be compared side by side.
pub fn render_hidden_effect<T: Scalar>(samples: &[HiddenEffectSample<'_, T>]) -> String {
    let horizons = samples
        .iter()
        .map(|s| s.report.meta.random_walk.len())
        .max()
        .unwrap_or(0);
    let mut blocks = Vec::new();
    for k in 0..horizons {
        let names = horizon_names(k + 1);
        let mut block = header(
            &["Sample", "Input", "Hidden"],
            [&names[0], &names[1], &names[2]],
        );
        block.push('\n');
        for s in samples {
            for cell in &s.report.cells {
                let (p, h) = cell.key();
                if s.inputs.is_some_and(|want| want != p) {
                    continue;
                }
                let body = match cell {
                    CellRecord::Ok(c) => match c.out_sample.get(k) {
                        Some(m) => metric_cols(&m.metrics),
                        None => "  n/a".to_string(),
                    },
                    CellRecord::Failed(f) => format!("  FAILED: {}", f.error),
                };
                let _ = writeln!(block, "{}{}{}{body}", lab(s.label), lab(p), lab(h));
            }
        }
        blocks.push(block);
    }
    blocks.join("\n")
}
