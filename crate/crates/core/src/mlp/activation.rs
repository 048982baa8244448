use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Scalar;

/// Transfer functions a layer can apply to its weighted input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    /// Step: 1 for `x >= 0`, else 0.
    HardLimit,
    PureLinear,
    /// Logistic `1 / (1 + e^-x)`.
    Sigmoid,
    /// `2 / (1 + e^-2x) - 1`, numerically equal to `tanh`.
    TanSigmoid,
}

impl Activation {
    pub const ALL: [Activation; 4] = [
        Activation::HardLimit,
        Activation::PureLinear,
        Activation::Sigmoid,
        Activation::TanSigmoid,
    ];

    pub fn apply<T: Scalar>(self, x: T) -> T {
        let one = T::one();
        let two = one + one;
        match self {
            Activation::HardLimit => {
                if x >= T::zero() {
                    one
                } else {
                    T::zero()
                }
            }
            Activation::PureLinear => x,
            Activation::Sigmoid => one / (one + (-x).exp()),
            Activation::TanSigmoid => two / (one + (-two * x).exp()) - one,
        }
    }

    /// Derivative at the point whose activation value is `y`, or `None` for
    /// the step function.
    pub fn derivative_at_output<T: Scalar>(self, y: T) -> Option<T> {
        let one = T::one();
        match self {
            Activation::HardLimit => None,
            Activation::PureLinear => Some(one),
            Activation::Sigmoid => Some(y * (one - y)),
            Activation::TanSigmoid => Some(one - y * y),
        }
    }

    pub fn is_differentiable(self) -> bool {
        self != Activation::HardLimit
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::HardLimit => "hard_limit",
            Activation::PureLinear => "pure_linear",
            Activation::Sigmoid => "sigmoid",
            Activation::TanSigmoid => "tansigmoid",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Activation::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown activation {s:?}")))
    }
}
