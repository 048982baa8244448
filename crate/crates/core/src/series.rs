//! Univariate series ingestion, splitting, scaling and windowing.
//!
//! Every algorithm downstream works on index order. Dates are kept only so
//! reports and summaries can say which period they cover.

use std::io::Write;
use std::ops::Range;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordered, dated observations of a single quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    name: String,
    dates: Vec<NaiveDate>,
    values: Vec<T>,
}

impl<T: Scalar> TimeSeries<T> {
    /// Builds a series, checking that it is nonempty, that dates strictly
    /// increase and that every value is finite.
    pub fn new(name: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if dates.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                got: dates.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { row: i + 1 });
            }
        }
        for (i, pair) in dates.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(Error::DateOrder {
                    row: i + 2,
                    date: pair[1],
                    previous: pair[0],
                });
            }
        }
        Ok(Self {
            name: name.into(),
            dates,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }

    pub fn last_value(&self) -> T {
        self.values[self.values.len() - 1]
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Contiguous sub-series. Panics if `range` is empty or out of bounds.
    pub fn slice(&self, range: Range<usize>) -> Self {
        assert!(!range.is_empty(), "series slice must be nonempty");
        Self {
            name: self.name.clone(),
            dates: self.dates[range.clone()].to_vec(),
            values: self.values[range].to_vec(),
        }
    }

    /// Writes `date,value` rows with a header line. Values use the shortest
    /// representation that parses back to the same number.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "date,value")?;
        for (d, v) in self.dates.iter().zip(&self.values) {
            writeln!(out, "{},{}", d.format("%Y-%m-%d"), v)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Whether the first row of a file is a header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// The first row is a header exactly when its date field does not parse.
    #[default]
    Auto,
    Present,
    Absent,
}

/// Layout of a delimiter-separated series file.
#[derive(Debug, Clone)]
pub struct ColumnSpec {
    pub delimiter: u8,
    pub date_column: usize,
    pub value_column: usize,
    pub header: HeaderMode,
    /// `chrono` format string for the date column.
    pub date_format: String,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            delimiter: b',',
            date_column: 0,
            value_column: 1,
            header: HeaderMode::Auto,
            date_format: "%Y-%m-%d".to_string(),
        }
    }
}

/// Parses delimiter-separated `(date, value)` rows into a series.
///
/// Row numbers in errors are 1-based line numbers of the input text. Empty
/// value fields are rejected rather than interpolated.
pub fn parse_series<T: Scalar>(text: &str, spec: &ColumnSpec, name: &str) -> Result<TimeSeries<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(spec.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut dates = Vec::new();
    let mut values = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedRow {
            row: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let is_first = std::mem::replace(&mut first, false);
        let field = |col: usize, what: &str| {
            record.get(col).ok_or_else(|| Error::MalformedRow {
                row,
                reason: format!("missing {what} column {col}"),
            })
        };
        let date_text = field(spec.date_column, "date")?;
        let date = match NaiveDate::parse_from_str(date_text, &spec.date_format) {
            Ok(d) => {
                if is_first && spec.header == HeaderMode::Present {
                    continue;
                }
                d
            }
            Err(_) if is_first && spec.header != HeaderMode::Absent => continue,
            Err(e) => {
                return Err(Error::MalformedRow {
                    row,
                    reason: format!("bad date {date_text:?}: {e}"),
                })
            }
        };
        let value_text = field(spec.value_column, "value")?;
        if value_text.is_empty() {
            return Err(Error::MalformedRow {
                row,
                reason: "missing value".to_string(),
            });
        }
        let value: f64 = value_text.parse().map_err(|_| Error::MalformedRow {
            row,
            reason: format!("bad value {value_text:?}"),
        })?;
        let value = T::from_f64(value).filter(|v| v.is_finite());
        let Some(value) = value else {
            return Err(Error::NonFiniteValue { row });
        };
        if let Some(&previous) = dates.last() {
            if date <= previous {
                return Err(Error::DateOrder {
                    row,
                    date,
                    previous,
                });
            }
        }
        dates.push(date);
        values.push(value);
    }
    TimeSeries::new(name, dates, values)
}

/// Supervised patterns: each input holds `window_len` consecutive values and
/// the target is the value that follows them.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset<T> {
    window_len: usize,
    inputs: Vec<T>,
    targets: Vec<T>,
}

impl<T: Scalar> WindowedDataset<T> {
    /// Slides a window of length `p` over `values`, producing `len - p`
    /// patterns in series order.
    pub fn from_values(values: &[T], p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::ZeroWindow);
        }
        if p >= values.len() {
            return Err(Error::TooFewObservations {
                window: p,
                len: values.len(),
            });
        }
        let count = values.len() - p;
        let mut inputs = Vec::with_capacity(count * p);
        for i in 0..count {
            inputs.extend_from_slice(&values[i..i + p]);
        }
        Ok(Self {
            window_len: p,
            inputs,
            targets: values[p..].to_vec(),
        })
    }

    /// Builds a dataset from explicit patterns; `inputs` is row-major.
    pub fn from_patterns(window_len: usize, inputs: Vec<T>, targets: Vec<T>) -> Result<Self> {
        if window_len == 0 {
            return Err(Error::ZeroWindow);
        }
        if inputs.len() != window_len * targets.len() {
            return Err(Error::DimensionMismatch {
                expected: window_len * targets.len(),
                got: inputs.len(),
            });
        }
        Ok(Self {
            window_len,
            inputs,
            targets,
        })
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input(&self, i: usize) -> &[T] {
        &self.inputs[i * self.window_len..(i + 1) * self.window_len]
    }

    pub fn target(&self, i: usize) -> T {
        self.targets[i]
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    pub fn patterns(&self) -> impl Iterator<Item = (&[T], T)> + '_ {
        self.inputs
            .chunks_exact(self.window_len)
            .zip(self.targets.iter().copied())
    }
}

pub fn make_windows<T: Scalar>(series: &TimeSeries<T>, p: usize) -> Result<WindowedDataset<T>> {
    WindowedDataset::from_values(series.values(), p)
}

/// Splits off the final `test_len` observations as the test set and the
/// `train_len` observations just before them as the training set.
pub fn split_by_count<T: Scalar>(
    series: &TimeSeries<T>,
    train_len: usize,
    test_len: usize,
) -> Result<(TimeSeries<T>, TimeSeries<T>)> {
    let n = series.len();
    if train_len == 0 || test_len == 0 || train_len.saturating_add(test_len) > n {
        return Err(Error::SplitOutOfRange {
            train: train_len,
            test: test_len,
            len: n,
        });
    }
    let test_start = n - test_len;
    Ok((
        series.slice(test_start - train_len..test_start),
        series.slice(test_start..n),
    ))
}

/// Affine map of the training range onto `[0, 1]`. Values outside the
/// training range map outside `[0, 1]`; nothing is clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaler<T> {
    min: T,
    max: T,
}

impl<T: Scalar> Scaler<T> {
    pub fn fit(train: &TimeSeries<T>) -> Result<Self> {
        Self::fit_values(train.values())
    }

    pub fn new(min: T, max: T) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidParameter(
                "scaler bounds must be finite".into(),
            ));
        }
        if max <= min {
            return Err(Error::ConstantSeries(min.as_f64()));
        }
        Ok(Self { min, max })
    }

    pub fn fit_values(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let min = values.iter().copied().fold(T::infinity(), T::min);
        let max = values.iter().copied().fold(T::neg_infinity(), T::max);
        Self::new(min, max)
    }

    pub fn min(&self) -> T {
        self.min
    }

    pub fn max(&self) -> T {
        self.max
    }

    pub fn apply(&self, x: T) -> T {
        (x - self.min) / (self.max - self.min)
    }

    pub fn invert(&self, x: T) -> T {
        x * (self.max - self.min) + self.min
    }

    pub fn apply_all(&self, xs: &[T]) -> Vec<T> {
        xs.iter().map(|&x| self.apply(x)).collect()
    }
}
