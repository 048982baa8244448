//! Line-delimited report files.
//!
//! The first line is a header record carrying the format tag, version and
//! the sweep's [`ReportMeta`]. Each following line is one [`CellRecord`] in
//! `(inputs, hidden)` order, so a sweep can be written as it runs.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::grid::{CellRecord, GridReport, GridSink, ReportMeta};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const REPORT_FORMAT: &str = "fxcast-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header<T> {
    format: String,
    version: u32,
    #[serde(flatten)]
    meta: ReportMeta<T>,
}

/// Writes report records to any byte sink, one JSON object per line.
pub struct ReportWriter<W> {
    out: W,
}

impl<W: Write> ReportWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }

    fn line<S: Serialize>(&mut self, record: &S) -> Result<()> {
        let text = serde_json::to_string(record).map_err(|e| Error::Corrupt(e.to_string()))?;
        writeln!(self.out, "{text}")?;
        self.out.flush()?;
        Ok(())
    }
}

impl<T: Scalar, W: Write> GridSink<T> for ReportWriter<W> {
    fn begin(&mut self, meta: &ReportMeta<T>) -> Result<()> {
        self.line(&Header {
            format: REPORT_FORMAT.to_string(),
            version: REPORT_VERSION,
            meta: meta.clone(),
        })
    }

    fn cell(&mut self, record: &CellRecord<T>) -> Result<()> {
        self.line(record)
    }
}

pub fn save_report<T: Scalar, W: Write>(report: &GridReport<T>, out: W) -> Result<()> {
    let mut writer = ReportWriter::new(out);
    writer.begin(&report.meta)?;
    for cell in &report.cells {
        writer.cell(cell)?;
    }
    Ok(())
}

/// Reads a complete report. Missing or out-of-order cells are reported as
/// corruption.
pub fn load_report<T: Scalar, R: Read>(source: R) -> Result<GridReport<T>> {
    load(source, false)
}

/// Reads a report that may have been cut short, e.g. by an interrupted
/// sweep. Cells present must still be valid; an incomplete final line is
/// ignored.
pub fn load_partial_report<T: Scalar, R: Read>(source: R) -> Result<GridReport<T>> {
    load(source, true)
}

fn load<T: Scalar, R: Read>(source: R, partial: bool) -> Result<GridReport<T>> {
    let mut lines = BufReader::new(source).lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Corrupt("empty report".to_string()))??;
    let value: serde_json::Value =
        serde_json::from_str(&first).map_err(|e| Error::Corrupt(format!("line 1: {e}")))?;
    if value.get("format").and_then(|f| f.as_str()) != Some(REPORT_FORMAT) {
        return Err(Error::Corrupt("line 1: not a report header".to_string()));
    }
    let version = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if version != REPORT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: REPORT_VERSION,
        });
    }
    let header: Header<T> =
        serde_json::from_value(value).map_err(|e| Error::Corrupt(format!("line 1: {e}")))?;
    let meta = header.meta;
    meta.config.validate()?;

    let expected = meta.config.cells();
    let mut cells = Vec::with_capacity(expected.len());
    let mut lines = lines.enumerate().peekable();
    while let Some((i, line)) = lines.next() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CellRecord<T> = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(_) if partial && lines.peek().is_none() => break,
            Err(e) => return Err(Error::Corrupt(format!("line {}: {e}", i + 2))),
        };
        if expected.get(cells.len()) != Some(&record.key()) {
            return Err(Error::Corrupt(format!(
                "line {}: unexpected cell {:?}",
                i + 2,
                record.key()
            )));
        }
        if let CellRecord::Ok(c) = &record {
            if c.out_sample.len() != meta.config.horizons.windows().len() {
                return Err(Error::Corrupt(format!(
                    "line {}: wrong number of horizons",
                    i + 2
                )));
            }
        }
        cells.push(record);
    }
    if !partial && cells.len() != expected.len() {
        return Err(Error::Corrupt(format!(
            "truncated: {} of {} cells present",
            cells.len(),
            expected.len()
        )));
    }
    Ok(GridReport::new(meta, cells))
}
