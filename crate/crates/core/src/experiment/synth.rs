//! Synthetic benchmark series.

use std::str::FromStr;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    /// `x[t+1] = r * x[t] * (1 - x[t])`, starting at `x0`.
    LogisticMap { r: f64, x0: f64 },
    /// `y[t+1] = phi * y[t] + e[t]` with `e ~ U(-sigma, sigma)`, starting at `y0`.
    NoisyAr1 { phi: f64, sigma: f64, y0: f64 },
    /// `y[t] = sin(omega * t)` for `t = 0, 1, ...`.
    Sine { omega: f64 },
}

impl SynthKind {
    pub fn name(&self) -> &'static str {
        match self {
            SynthKind::LogisticMap { .. } => "logistic_map",
            SynthKind::NoisyAr1 { .. } => "noisy_ar1",
            SynthKind::Sine { .. } => "sine",
        }
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    /// A kind name with its default parameters.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic_map" => Ok(SynthKind::LogisticMap { r: 4.0, x0: 0.3 }),
            "noisy_ar1" => Ok(SynthKind::NoisyAr1 {
                phi: 0.8,
                sigma: 0.1,
                y0: 0.0,
            }),
            "sine" => Ok(SynthKind::Sine { omega: 0.1 }),
            other => Err(Error::InvalidParameter(format!(
                "unknown series kind {other:?}"
            ))),
        }
    }
}

/// First date of every synthetic series; observations are one week apart.
pub fn synthetic_epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 7).expect("valid date")
}

/// Generates `n` observations of the given kind. Only `NoisyAr1` uses `seed`.
pub fn synthesize_series<T: Scalar>(
    kind: &SynthKind,
    n: usize,
    seed: u64,
) -> Result<TimeSeries<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 observations, got {n}"
        )));
    }
    let values: Vec<T> = match *kind {
        SynthKind::LogisticMap { r, x0 } => {
            if r.is_nan() || r <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "r must be positive, got {r}"
                )));
            }
            if !(x0 > 0.0 && x0 < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "x0 must lie in (0, 1), got {x0}"
                )));
            }
            let (r, one) = (T::of(r), T::one());
            std::iter::successors(Some(T::of(x0)), |&x| Some(r * x * (one - x)))
                .take(n)
                .collect()
        }
        SynthKind::NoisyAr1 { phi, sigma, y0 } => {
            if sigma.is_nan() || sigma < 0.0 || !phi.is_finite() || !y0.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "noisy_ar1 needs finite phi and y0 and sigma >= 0, got phi={phi}, sigma={sigma}, y0={y0}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut y = y0;
            let mut out = Vec::with_capacity(n);
            out.push(T::of(y));
            for _ in 1..n {
                let noise = if sigma > 0.0 {
                    rng.random_range(-sigma..sigma)
                } else {
                    0.0
                };
                y = phi * y + noise;
                out.push(T::of(y));
            }
            out
        }
        SynthKind::Sine { omega } => {
            if !omega.is_finite() {
                return Err(Error::InvalidParameter("omega must be finite".to_string()));
            }
            (0..n).map(|t| T::of((omega * t as f64).sin())).collect()
        }
    };
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "series leaves the finite range at observation {i}"
        )));
    }
    let start = synthetic_epoch();
    let dates = (0..n)
        .map(|i| start + chrono::Duration::weeks(i as i64))
        .collect();
    TimeSeries::new(kind.name(), dates, values)
}
