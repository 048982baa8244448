//! Forecast accuracy measures and the random-walk benchmark.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Paired actual and predicted values, in original units.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSet<T> {
    actual: Vec<T>,
    predicted: Vec<T>,
}

impl<T: Scalar> ForecastSet<T> {
    pub fn new(actual: Vec<T>, predicted: Vec<T>) -> Result<Self> {
        if actual.len() != predicted.len() {
            return Err(Error::InvalidForecast(format!(
                "{} actual values but {} predictions",
                actual.len(),
                predicted.len()
            )));
        }
        if actual.is_empty() {
            return Err(Error::InvalidForecast("no forecasts".to_string()));
        }
        if !actual.iter().chain(&predicted).all(|v| v.is_finite()) {
            return Err(Error::InvalidForecast("non-finite value".to_string()));
        }
        Ok(Self { actual, predicted })
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }

    pub fn actual(&self) -> &[T] {
        &self.actual
    }

    pub fn predicted(&self) -> &[T] {
        &self.predicted
    }

    /// The first `len` forecasts, or `None` if `len` is 0 or too long.
    pub fn prefix(&self, len: usize) -> Option<Self> {
        (len >= 1 && len <= self.len()).then(|| Self {
            actual: self.actual[..len].to_vec(),
            predicted: self.predicted[..len].to_vec(),
        })
    }

    fn errors(&self) -> impl Iterator<Item = T> + '_ {
        self.actual
            .iter()
            .zip(&self.predicted)
            .map(|(&a, &p)| a - p)
    }

    fn count(&self) -> T {
        T::from_count(self.len())
    }
}

pub fn rmse<T: Scalar>(fs: &ForecastSet<T>) -> T {
    (fs.errors().map(|e| e * e).sum::<T>() / fs.count()).sqrt()
}

pub fn mae<T: Scalar>(fs: &ForecastSet<T>) -> T {
    fs.errors().map(T::abs).sum::<T>() / fs.count()
}

/// Mean absolute percentage error, in percent. Fails if any actual value
/// is zero.
pub fn mape<T: Scalar>(fs: &ForecastSet<T>) -> Result<T> {
    if let Some(i) = fs.actual.iter().position(|a| a.is_zero()) {
        return Err(Error::ZeroActual(i));
    }
    let total: T = fs
        .actual
        .iter()
        .zip(&fs.predicted)
        .map(|(&a, &p)| ((a - p) / a).abs())
        .sum();
    Ok(total / fs.count() * T::of(100.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow<T> {
    pub rmse: T,
    pub mae: T,
    /// Percent.
    pub mape: T,
}

impl<T: Scalar> MetricRow<T> {
    pub fn compute(fs: &ForecastSet<T>) -> Result<Self> {
        Ok(Self {
            rmse: rmse(fs),
            mae: mae(fs),
            mape: mape(fs)?,
        })
    }

    /// Componentwise arithmetic mean. Panics on an empty slice.
    pub fn mean(rows: &[Self]) -> Self {
        assert!(!rows.is_empty(), "mean of no metric rows");
        let n = T::from_count(rows.len());
        Self {
            rmse: rows.iter().map(|r| r.rmse).sum::<T>() / n,
            mae: rows.iter().map(|r| r.mae).sum::<T>() / n,
            mape: rows.iter().map(|r| r.mape).sum::<T>() / n,
        }
    }
}

/// Naive one-step-ahead forecasts: each value is predicted by the one
/// before it, and the first by `history_last`.
pub fn random_walk<T: Scalar>(history_last: T, test: &[T]) -> Result<ForecastSet<T>> {
    if test.is_empty() {
        return Err(Error::InvalidForecast("empty test period".to_string()));
    }
    let predicted = std::iter::once(history_last)
        .chain(test[..test.len() - 1].iter().copied())
        .collect();
    ForecastSet::new(test.to_vec(), predicted)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub label: String,
    pub len: usize,
}

/// Evaluation windows over the start of the test period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorizonSpec {
    windows: Vec<Horizon>,
}

impl Default for HorizonSpec {
    /// One, six and twelve months of weekly observations.
    fn default() -> Self {
        Self {
            windows: vec![
                Horizon {
                    label: "1m".into(),
                    len: 4,
                },
                Horizon {
                    label: "6m".into(),
                    len: 26,
                },
                Horizon {
                    label: "12m".into(),
                    len: 52,
                },
            ],
        }
    }
}

impl HorizonSpec {
    pub fn new(windows: Vec<Horizon>) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::InvalidConfig("no horizons given".into()));
        }
        if windows.iter().any(|w| w.len == 0) {
            return Err(Error::InvalidConfig(
                "horizon lengths must be positive".into(),
            ));
        }
        if windows.windows(2).any(|w| w[1].len <= w[0].len) {
            return Err(Error::InvalidConfig(
                "horizon lengths must be strictly increasing".into(),
            ));
        }
        Ok(Self { windows })
    }

    pub fn windows(&self) -> &[Horizon] {
        &self.windows
    }

    pub fn longest(&self) -> usize {
        self.windows.last().map_or(0, |w| w.len)
    }
}

impl std::str::FromStr for HorizonSpec {
    type Err = Error;

    /// Parses `label:len` pairs separated by commas, e.g. `1m:4,6m:26`.
    fn from_str(s: &str) -> Result<Self> {
        let windows =
            s.split(',')
                .map(|part| {
                    let (label, len) = part.trim().split_once(':').ok_or_else(|| {
                        Error::InvalidConfig(format!("horizon {part:?} is not label:length"))
                    })?;
                    let len = len.trim().parse().map_err(|_| {
                        Error::InvalidConfig(format!("bad horizon length in {part:?}"))
                    })?;
                    Ok(Horizon {
                        label: label.trim().to_string(),
                        len,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        Self::new(windows)
    }
}

/// Metrics over each horizon's prefix of the forecast stream.
pub fn evaluate_horizons<T: Scalar>(
    fs: &ForecastSet<T>,
    spec: &HorizonSpec,
) -> Result<Vec<(String, MetricRow<T>)>> {
    spec.windows
        .iter()
        .map(|w| {
            let prefix = fs.prefix(w.len).ok_or_else(|| Error::HorizonTooLong {
                label: w.label.clone(),
                len: w.len,
                available: fs.len(),
            })?;
            Ok((w.label.clone(), MetricRow::compute(&prefix)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(actual: &[f64], predicted: &[f64]) -> ForecastSet<f64> {
        ForecastSet::new(actual.to_vec(), predicted.to_vec()).unwrap()
    }

    #[test]
    fn worked_example() {
        let f = fs(&[2., 4.], &[1., 5.]);
        assert_eq!(rmse(&f), 1.0);
        assert_eq!(mae(&f), 1.0);
        assert_eq!(mape(&f).unwrap(), 37.5);
    }

    #[test]
    fn single_terms() {
        assert_eq!(rmse(&fs(&[3.], &[5.])), 2.0);
        assert_eq!(mae(&fs(&[0.], &[-2.])), 2.0);
    }

    #[test]
    fn perfect_forecast_scores_zero() {
        let f = fs(&[1.5, -2., 7.], &[1.5, -2., 7.]);
        assert_eq!(
            MetricRow::compute(&f).unwrap(),
            MetricRow {
                rmse: 0.0,
                mae: 0.0,
                mape: 0.0
            }
        );
    }

    #[test]
    fn mape_rejects_zero_actual() {
        assert!(matches!(
            mape(&fs(&[1., 0.], &[1., 1.])),
            Err(Error::ZeroActual(1))
        ));
    }

    #[test]
    fn forecast_set_validation() {
        assert!(ForecastSet::new(vec![1.0], vec![]).is_err());
        assert!(ForecastSet::<f64>::new(vec![], vec![]).is_err());
        assert!(ForecastSet::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn random_walk_examples() {
        let f = random_walk(1.0, &[2., 3.]).unwrap();
        assert_eq!(f.predicted(), &[1., 2.]);
        assert_eq!(f.actual(), &[2., 3.]);
        let flat = random_walk(5.0, &[5., 5., 5.]).unwrap();
        assert_eq!(MetricRow::compute(&flat).unwrap().rmse, 0.0);
        assert_eq!(random_walk(9.0, &[1.]).unwrap().predicted(), &[9.]);
        assert!(random_walk::<f64>(1.0, &[]).is_err());
    }

    #[test]
    fn horizon_prefixes() {
        let actual: Vec<f64> = (1..=52).map(f64::from).collect();
        let predicted: Vec<f64> = actual.iter().map(|a| a + (a * 0.37).sin()).collect();
        let f = fs(&actual, &predicted);
        let rows = evaluate_horizons(&f, &HorizonSpec::default()).unwrap();
        let labels: Vec<_> = rows.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["1m", "6m", "12m"]);
        assert_eq!(
            rows[0].1,
            MetricRow::compute(&f.prefix(4).unwrap()).unwrap()
        );
        assert_eq!(
            rows[1].1,
            MetricRow::compute(&f.prefix(26).unwrap()).unwrap()
        );
        assert_eq!(rows[2].1, MetricRow::compute(&f).unwrap());

        let long: HorizonSpec = "5y:60".parse().unwrap();
        assert!(matches!(
            evaluate_horizons(&f, &long),
            Err(Error::HorizonTooLong {
                len: 60,
                available: 52,
                ..
            })
        ));
    }

    #[test]
    fn horizon_spec_parsing() {
        let spec: HorizonSpec = "1m:4, 6m:26,12m:52".parse().unwrap();
        assert_eq!(spec, HorizonSpec::default());
        assert!("1m:4,6m:4".parse::<HorizonSpec>().is_err());
        assert!("1m".parse::<HorizonSpec>().is_err());
        assert!("1m:0".parse::<HorizonSpec>().is_err());
    }

    #[test]
    fn mean_of_rows() {
        let rows = [
            MetricRow {
                rmse: 1.0,
                mae: 2.0,
                mape: 3.0,
            },
            MetricRow {
                rmse: 3.0,
                mae: 4.0,
                mape: 5.0,
            },
        ];
        assert_eq!(
            MetricRow::mean(&rows),
            MetricRow {
                rmse: 2.0,
                mae: 3.0,
                mape: 4.0
            }
        );
    }
}
