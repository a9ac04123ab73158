//! Scalar functions used on the computational path of a neuron.

use serde::{Deserialize, Serialize};

/// Activation applied to a neuron's aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationFn {
    #[default]
    Relu,
    Identity,
    Sigmoid,
    Tanh,
}

impl ActivationFn {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            ActivationFn::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            ActivationFn::Identity => x,
            ActivationFn::Sigmoid => sigmoid(x),
            ActivationFn::Tanh => x.tanh(),
        }
    }
}

/// Function applied to an output neuron's aggregation, bypassing the
/// neuron's own activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFn {
    #[default]
    Sigmoid,
    Identity,
}

impl OutputFn {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            OutputFn::Sigmoid => sigmoid(x),
            OutputFn::Identity => x,
        }
    }
}

/// Transform applied to a raw input value before it is added to the
/// aggregation of its input neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFn {
    #[default]
    Identity,
    SignReversal,
}

impl InputFn {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            InputFn::Identity => x,
            InputFn::SignReversal => -x,
        }
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_reference_points() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(3f64.ln()) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn relu_clamps_negatives() {
        assert_eq!(ActivationFn::Relu.apply(-2.0), 0.0);
        assert_eq!(ActivationFn::Relu.apply(1.0), 1.0);
    }

    #[test]
    fn sign_reversal_negates() {
        assert_eq!(InputFn::SignReversal.apply(2.5), -2.5);
        assert_eq!(InputFn::Identity.apply(2.5), 2.5);
    }
}
