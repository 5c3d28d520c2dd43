//! The 2-3-1 binary neural network addressed by a 14-bit configuration.
//!
//! Bit layout (qubit number in brackets, signed value `w = 2σ − 1`):
//!
//! * `[0..6)`   hidden weights, neuron-major: `W[n][i]` is bit `2n + i`
//! * `[6..9)`   hidden biases
//! * `[9..12)`  output weights
//! * `[12]`     output bias
//! * `[13]`     hidden activation: 0 → ReLU, 1 → sigmoid
//!
//! The output unit is always a sigmoid.

use serde::{Deserialize, Serialize};

use crate::qsim::BitString;
use crate::{Error, Result};

/// Bits consumed by one configuration.
pub const CONFIG_BITS: usize = 14;

/// Probabilities are clamped to `[ε, 1 − ε]` before taking logs.
pub const PROB_CLAMP: f64 = 1e-7;

const HIDDEN: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Sigmoid,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => sigmoid(z),
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// One labelled 2-D input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x: [f64; 2],
    pub y: u8,
}

impl LabeledPoint {
    pub fn new(x: [f64; 2], y: u8) -> Self {
        Self { x, y }
    }
}

/// Decoded network; every signed entry is ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BinnConfig {
    pub hidden_weights: [[i8; 2]; HIDDEN],
    pub hidden_biases: [i8; HIDDEN],
    pub output_weights: [i8; HIDDEN],
    pub output_bias: i8,
    pub hidden_activation: Activation,
}

fn signed(bit: u8) -> i8 {
    2 * bit as i8 - 1
}

fn unsigned(w: i8) -> u8 {
    u8::from(w > 0)
}

/// Reads a 14-bit configuration.
pub fn decode(bits: BitString) -> Result<BinnConfig> {
    if bits.len() != CONFIG_BITS {
        return Err(Error::BitLength {
            expected: CONFIG_BITS,
            actual: bits.len(),
        });
    }
    let s = |i: usize| signed(bits.bit(i));
    let mut hidden_weights = [[0i8; 2]; HIDDEN];
    for (n, row) in hidden_weights.iter_mut().enumerate() {
        *row = [s(2 * n), s(2 * n + 1)];
    }
    Ok(BinnConfig {
        hidden_weights,
        hidden_biases: [s(6), s(7), s(8)],
        output_weights: [s(9), s(10), s(11)],
        output_bias: s(12),
        hidden_activation: if bits.bit(13) == 0 {
            Activation::Relu
        } else {
            Activation::Sigmoid
        },
    })
}

/// Inverse of [`decode`]. Entries other than ±1 are read by their sign.
pub fn encode(config: &BinnConfig) -> BitString {
    let mut bits = Vec::with_capacity(CONFIG_BITS);
    for row in &config.hidden_weights {
        bits.extend(row.iter().map(|&w| unsigned(w)));
    }
    bits.extend(config.hidden_biases.iter().map(|&w| unsigned(w)));
    bits.extend(config.output_weights.iter().map(|&w| unsigned(w)));
    bits.push(unsigned(config.output_bias));
    bits.push(u8::from(config.hidden_activation == Activation::Sigmoid));
    BitString::from_bits(&bits).expect("14 valid bits")
}

impl BinnConfig {
    /// Predicted probability of class 1.
    pub fn forward(&self, x: [f64; 2]) -> f64 {
        let mut z = f64::from(self.output_bias);
        for n in 0..HIDDEN {
            let [w0, w1] = self.hidden_weights[n];
            let pre =
                f64::from(w0) * x[0] + f64::from(w1) * x[1] + f64::from(self.hidden_biases[n]);
            z += f64::from(self.output_weights[n]) * self.hidden_activation.apply(pre);
        }
        sigmoid(z)
    }

    fn point_log_likelihood(&self, p: &LabeledPoint) -> f64 {
        let y_hat = self.forward(p.x).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        if p.y == 1 {
            y_hat.ln()
        } else {
            (1.0 - y_hat).ln()
        }
    }
}

/// Mean Bernoulli log-likelihood over `data` (the negated mean BCE).
pub fn log_likelihood(config: &BinnConfig, data: &[LabeledPoint]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let total: f64 = data.iter().map(|p| config.point_log_likelihood(p)).sum();
    Ok(total / data.len() as f64)
}

/// Mean binary cross-entropy.
pub fn bce(config: &BinnConfig, data: &[LabeledPoint]) -> Result<f64> {
    log_likelihood(config, data).map(|ll| -ll)
}

/// Fraction of points where `ŷ ≥ 0.5` agrees with the label.
pub fn accuracy(config: &BinnConfig, data: &[LabeledPoint]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let hits = data
        .iter()
        .filter(|p| u8::from(config.forward(p.x) >= 0.5) == p.y)
        .count();
    Ok(hits as f64 / data.len() as f64)
}
