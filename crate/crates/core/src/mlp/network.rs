use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Activation;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{Scaler, WindowedDataset};

/// Format tag written into serialized networks.
pub const MODEL_FORMAT: &str = "fxcast-mlp";
pub const MODEL_VERSION: u32 = 1;

/// Shape of a three-layer network with a single output node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub inputs: usize,
    pub hidden: usize,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
}

impl Architecture {
    /// Logistic hidden layer and linear output.
    pub fn new(inputs: usize, hidden: usize) -> Result<Self> {
        Self::with_activations(inputs, hidden, Activation::Sigmoid, Activation::PureLinear)
    }

    pub fn with_activations(
        inputs: usize,
        hidden: usize,
        hidden_activation: Activation,
        output_activation: Activation,
    ) -> Result<Self> {
        if inputs == 0 || hidden == 0 {
            return Err(Error::InvalidConfig(format!(
                "architecture needs at least one input and one hidden node, got {inputs}x{hidden}"
            )));
        }
        Ok(Self {
            inputs,
            hidden,
            hidden_activation,
            output_activation,
        })
    }

    /// Total number of weights and biases.
    pub fn parameter_count(&self) -> usize {
        self.hidden * (self.inputs + 2) + 1
    }

    pub(crate) fn check_differentiable(&self) -> Result<()> {
        for act in [self.hidden_activation, self.output_activation] {
            if !act.is_differentiable() {
                return Err(Error::NonDifferentiable(act));
            }
        }
        Ok(())
    }
}

/// Weights and biases of a network, or a gradient with the same layout.
///
/// `hidden_weights` is row-major: row `j` holds the incoming weights of
/// hidden node `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters<T> {
    pub hidden_weights: Vec<T>,
    pub hidden_biases: Vec<T>,
    pub output_weights: Vec<T>,
    pub output_bias: T,
}

impl<T: Scalar> Parameters<T> {
    pub fn zeros(arch: &Architecture) -> Self {
        Self {
            hidden_weights: vec![T::zero(); arch.hidden * arch.inputs],
            hidden_biases: vec![T::zero(); arch.hidden],
            output_weights: vec![T::zero(); arch.hidden],
            output_bias: T::zero(),
        }
    }

    /// Flat view in serialization order: hidden weight rows, hidden biases,
    /// output weights, output bias.
    pub fn to_flat(&self) -> Vec<T> {
        let mut flat =
            Vec::with_capacity(self.hidden_weights.len() + 2 * self.hidden_biases.len() + 1);
        flat.extend_from_slice(&self.hidden_weights);
        flat.extend_from_slice(&self.hidden_biases);
        flat.extend_from_slice(&self.output_weights);
        flat.push(self.output_bias);
        flat
    }

    pub fn from_flat(arch: &Architecture, flat: &[T]) -> Result<Self> {
        if flat.len() != arch.parameter_count() {
            return Err(Error::DimensionMismatch {
                expected: arch.parameter_count(),
                got: flat.len(),
            });
        }
        let (hw, rest) = flat.split_at(arch.hidden * arch.inputs);
        let (hb, rest) = rest.split_at(arch.hidden);
        let (ow, rest) = rest.split_at(arch.hidden);
        Ok(Self {
            hidden_weights: hw.to_vec(),
            hidden_biases: hb.to_vec(),
            output_weights: ow.to_vec(),
            output_bias: rest[0],
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.hidden_weights
            .iter()
            .chain(&self.hidden_biases)
            .chain(&self.output_weights)
            .copied()
            .chain(std::iter::once(self.output_bias))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut T> + '_ {
        self.hidden_weights
            .iter_mut()
            .chain(&mut self.hidden_biases)
            .chain(&mut self.output_weights)
            .chain(std::iter::once(&mut self.output_bias))
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(T::is_finite)
    }

    /// `self += scale * other`, elementwise.
    pub fn add_scaled(&mut self, scale: T, other: &Self) {
        for (p, g) in self.iter_mut().zip(other.iter()) {
            *p = *p + scale * g;
        }
    }

    fn matches(&self, arch: &Architecture) -> bool {
        self.hidden_weights.len() == arch.hidden * arch.inputs
            && self.hidden_biases.len() == arch.hidden
            && self.output_weights.len() == arch.hidden
    }
}

/// A fully connected network: `inputs` lagged values, one hidden layer and
/// a single output node.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    arch: Architecture,
    params: Parameters<T>,
}

#[derive(Serialize, Deserialize)]
struct ModelRecord<T> {
    format: String,
    version: u32,
    inputs: usize,
    hidden: usize,
    hidden_activation: Activation,
    output_activation: Activation,
    parameters: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scaler: Option<Scaler<T>>,
}

impl<T: Scalar> Mlp<T> {
    pub fn new(arch: Architecture, params: Parameters<T>) -> Result<Self> {
        if !params.matches(&arch) {
            return Err(Error::DimensionMismatch {
                expected: arch.parameter_count(),
                got: params.hidden_weights.len()
                    + params.hidden_biases.len()
                    + params.output_weights.len()
                    + 1,
            });
        }
        if !params.is_finite() {
            return Err(Error::InvalidParameter(
                "network parameters must be finite".to_string(),
            ));
        }
        Ok(Self { arch, params })
    }

    pub fn zeros(arch: Architecture) -> Self {
        let params = Parameters::zeros(&arch);
        Self { arch, params }
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    pub fn params(&self) -> &Parameters<T> {
        &self.params
    }

    pub fn into_params(self) -> Parameters<T> {
        self.params
    }

    /// Network output for one input window.
    pub fn forward(&self, input: &[T]) -> Result<T> {
        if input.len() != self.arch.inputs {
            return Err(Error::DimensionMismatch {
                expected: self.arch.inputs,
                got: input.len(),
            });
        }
        let mut hidden = vec![T::zero(); self.arch.hidden];
        Ok(self.forward_into(input, &mut hidden))
    }

    /// Forward pass that leaves hidden activations in `hidden`.
    fn forward_into(&self, input: &[T], hidden: &mut [T]) -> T {
        let p = self.arch.inputs;
        let act = self.arch.hidden_activation;
        let mut z_out = self.params.output_bias;
        for (j, h) in hidden.iter_mut().enumerate() {
            let row = &self.params.hidden_weights[j * p..(j + 1) * p];
            let z = row
                .iter()
                .zip(input)
                .fold(self.params.hidden_biases[j], |acc, (&w, &x)| acc + w * x);
            *h = act.apply(z);
            z_out = z_out + self.params.output_weights[j] * *h;
        }
        self.arch.output_activation.apply(z_out)
    }

    fn check_data(&self, data: &WindowedDataset<T>) -> Result<()> {
        if data.window_len() != self.arch.inputs {
            return Err(Error::DimensionMismatch {
                expected: self.arch.inputs,
                got: data.window_len(),
            });
        }
        Ok(())
    }

    /// Outputs for every pattern of `data`, in order.
    pub fn predict(&self, data: &WindowedDataset<T>) -> Result<Vec<T>> {
        self.check_data(data)?;
        let mut hidden = vec![T::zero(); self.arch.hidden];
        Ok(data
            .patterns()
            .map(|(x, _)| self.forward_into(x, &mut hidden))
            .collect())
    }

    /// Sum of squared errors over all patterns.
    pub fn sse(&self, data: &WindowedDataset<T>) -> Result<T> {
        self.check_data(data)?;
        let mut hidden = vec![T::zero(); self.arch.hidden];
        Ok(data
            .patterns()
            .map(|(x, y)| {
                let r = y - self.forward_into(x, &mut hidden);
                r * r
            })
            .sum())
    }

    /// Exact gradient of the SSE with respect to every parameter.
    pub fn gradient(&self, data: &WindowedDataset<T>) -> Result<Parameters<T>> {
        self.sse_and_gradient(data).map(|(_, g)| g)
    }

    /// SSE and its gradient from a single pass over the data.
    pub fn sse_and_gradient(&self, data: &WindowedDataset<T>) -> Result<(T, Parameters<T>)> {
        self.check_data(data)?;
        self.arch.check_differentiable()?;
        let p = self.arch.inputs;
        let hidden_act = self.arch.hidden_activation;
        let output_act = self.arch.output_activation;
        let two = T::one() + T::one();

        let mut grad = Parameters::zeros(&self.arch);
        let mut hidden = vec![T::zero(); self.arch.hidden];
        let mut sse = T::zero();
        for (x, y) in data.patterns() {
            let out = self.forward_into(x, &mut hidden);
            let residual = out - y;
            sse = sse + residual * residual;
            let delta_out = two * residual * output_act.derivative_at_output(out).unwrap();
            grad.output_bias = grad.output_bias + delta_out;
            for (j, &h) in hidden.iter().enumerate() {
                grad.output_weights[j] = grad.output_weights[j] + delta_out * h;
                let delta_hidden = delta_out
                    * self.params.output_weights[j]
                    * hidden_act.derivative_at_output(h).unwrap();
                grad.hidden_biases[j] = grad.hidden_biases[j] + delta_hidden;
                let row = &mut grad.hidden_weights[j * p..(j + 1) * p];
                for (g, &xi) in row.iter_mut().zip(x) {
                    *g = *g + delta_hidden * xi;
                }
            }
        }
        Ok((sse, grad))
    }

    /// Serializes as a single JSON object: architecture fields followed by
    /// the flat parameter list.
    pub fn to_json(&self) -> String {
        self.to_json_with_scaler(None)
    }

    /// Like [`Mlp::to_json`], with the input/output scaling appended after
    /// the parameters.
    pub fn to_json_with_scaler(&self, scaler: Option<&Scaler<T>>) -> String {
        let record = ModelRecord {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            inputs: self.arch.inputs,
            hidden: self.arch.hidden,
            hidden_activation: self.arch.hidden_activation,
            output_activation: self.arch.output_activation,
            parameters: self.params.to_flat(),
            scaler: scaler.copied(),
        };
        serde_json::to_string(&record).expect("model record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_with_scaler(text).map(|(net, _)| net)
    }

    pub fn from_json_with_scaler(text: &str) -> Result<(Self, Option<Scaler<T>>)> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Corrupt(e.to_string()))?;
        if value.get("format").and_then(|f| f.as_str()) != Some(MODEL_FORMAT) {
            return Err(Error::Corrupt("not a serialized network".to_string()));
        }
        let version = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if version != MODEL_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: MODEL_VERSION,
            });
        }
        let record: ModelRecord<T> =
            serde_json::from_value(value).map_err(|e| Error::Corrupt(e.to_string()))?;
        let arch = Architecture::with_activations(
            record.inputs,
            record.hidden,
            record.hidden_activation,
            record.output_activation,
        )?;
        let params = Parameters::from_flat(&arch, &record.parameters)?;
        let scaler = match record.scaler {
            Some(s) => Some(Scaler::new(s.min(), s.max())?),
            None => None,
        };
        Ok((Self::new(arch, params)?, scaler))
    }

    pub fn save<W: Write>(&self, scaler: Option<&Scaler<T>>, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.to_json_with_scaler(scaler))?;
        out.flush()?;
        Ok(())
    }

    pub fn load<R: Read>(mut input: R) -> Result<(Self, Option<Scaler<T>>)> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        Self::from_json_with_scaler(text.trim_end())
    }
}

/// Draws every parameter independently and uniformly from
/// `[-half_width, half_width]`. The same seed always yields the same network.
pub fn init_weights<T: Scalar>(arch: Architecture, seed: u64, half_width: T) -> Mlp<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hw = half_width.as_f64();
    let mut params = Parameters::zeros(&arch);
    for p in params.iter_mut() {
        *p = T::of(rng.random_range(-hw..=hw));
    }
    Mlp { arch, params }
}
