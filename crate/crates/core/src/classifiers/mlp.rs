//! Fully connected feed-forward network with a softmax output layer,
//! trained by mini-batch backpropagation on mean cross-entropy.
//!
//! Initialization draws every layer's weights in order (input side first,
//! row-major `[output][input]`) uniformly from `[-r, r]` with
//! `r = sqrt(6 / (fan_in + fan_out))`; biases start at zero. Each epoch then
//! shuffles the instance order once and walks it in consecutive batches.
//! The first layer reads sparse inputs, so only columns with a non-zero
//! input in the batch are updated.

use std::fmt;
use std::str::FromStr;

use super::ClassifierError;
use crate::rng::SplitMix64;
use crate::vectorize::{FeatureMatrix, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Logistic,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Logistic => 1.0 / (1.0 + libm::exp(-z)),
            Activation::Tanh => libm::tanh(z),
        }
    }

    /// Derivative expressed through the activation output `a`.
    fn derivative(self, a: f64) -> f64 {
        match self {
            Activation::Logistic => a * (1.0 - a),
            Activation::Tanh => 1.0 - a * a,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Logistic => "logistic",
            Activation::Tanh => "tanh",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logistic" => Ok(Activation::Logistic),
            "tanh" => Ok(Activation::Tanh),
            other => Err(format!("unknown activation '{other}' (logistic or tanh)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: vec![32, 32],
            activation: Activation::Logistic,
            learning_rate: 0.1,
            epochs: 200,
            batch_size: 16,
        }
    }
}

impl MlpParams {
    fn validate(&self) -> Result<(), ClassifierError> {
        if self.hidden.is_empty() {
            return Err(ClassifierError::Hyperparameter("at least one hidden layer is required".into()));
        }
        if self.hidden.contains(&0) {
            return Err(ClassifierError::Hyperparameter("hidden layer widths must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ClassifierError::Hyperparameter(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(ClassifierError::Hyperparameter("batch size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub(crate) inputs: usize,
    pub(crate) outputs: usize,
    /// Row-major `[output][input]`.
    pub(crate) weights: Vec<f64>,
    pub(crate) bias: Vec<f64>,
}

impl Layer {
    fn glorot(inputs: usize, outputs: usize, rng: &mut SplitMix64) -> Self {
        let r = (6.0 / (inputs + outputs) as f64).sqrt();
        let weights = (0..inputs * outputs).map(|_| rng.uniform(-r, r)).collect();
        Layer {
            inputs,
            outputs,
            weights,
            bias: vec![0.0; outputs],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.outputs, self.inputs)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub(crate) params: MlpParams,
    pub(crate) layers: Vec<Layer>,
}

fn softmax(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in z.iter_mut() {
        *v = libm::exp(*v - max);
        total += *v;
    }
    for v in z.iter_mut() {
        *v /= total;
    }
}

/// Gradient buffers with the same layout as the network's parameters.
struct Gradients {
    weights: Vec<Vec<f64>>,
    bias: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros(layers: &[Layer]) -> Self {
        Gradients {
            weights: layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            bias: layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }
}

impl Mlp {
    /// Untrained network with freshly drawn weights.
    pub fn init(inputs: usize, classes: usize, params: &MlpParams, rng: &mut SplitMix64) -> Result<Self, ClassifierError> {
        params.validate()?;
        let mut widths = vec![inputs];
        widths.extend_from_slice(&params.hidden);
        widths.push(classes);
        let layers = widths.windows(2).map(|w| Layer::glorot(w[0], w[1], rng)).collect();
        Ok(Mlp {
            params: params.clone(),
            layers,
        })
    }

    pub fn fit(matrix: &FeatureMatrix, params: &MlpParams, seed: u64) -> Result<Self, ClassifierError> {
        let mut rng = SplitMix64::new(seed);
        let mut net = Mlp::init(matrix.width(), matrix.num_classes(), params, &mut rng)?;
        let mut order: Vec<usize> = (0..matrix.len()).collect();
        let mut grads = Gradients::zeros(&net.layers);
        let mut touched = vec![false; matrix.width()];
        let mut touched_list = Vec::new();
        for _ in 0..params.epochs {
            rng.shuffle(&mut order);
            for batch in order.chunks(params.batch_size) {
                for &i in batch {
                    let x = matrix.row(i);
                    for &j in x.indices() {
                        if !touched[j] {
                            touched[j] = true;
                            touched_list.push(j);
                        }
                    }
                    net.accumulate(x, matrix.labels()[i], &mut grads);
                }
                let step = params.learning_rate / batch.len() as f64;
                net.apply_update(&mut grads, step, &touched_list);
                for &j in &touched_list {
                    touched[j] = false;
                }
                touched_list.clear();
            }
        }
        Ok(net)
    }

    pub fn params(&self) -> &MlpParams {
        &self.params
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Activations of every layer; the last entry is the softmax output.
    fn forward(&self, x: &SparseVector) -> Vec<Vec<f64>> {
        let act = self.params.activation;
        let mut outs: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = layer.bias.clone();
            if l == 0 {
                for (o, zo) in z.iter_mut().enumerate() {
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    *zo += x.iter().map(|(i, v)| row[i] * v).sum::<f64>();
                }
            } else {
                let input = &outs[l - 1];
                for (o, zo) in z.iter_mut().enumerate() {
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    *zo += row.iter().zip(input).map(|(w, a)| w * a).sum::<f64>();
                }
            }
            if l == last {
                softmax(&mut z);
            } else {
                for v in &mut z {
                    *v = act.apply(*v);
                }
            }
            outs.push(z);
        }
        outs
    }

    /// Adds the cross-entropy gradient of one instance; returns its loss.
    fn accumulate(&self, x: &SparseVector, label: usize, grads: &mut Gradients) -> f64 {
        let outs = self.forward(x);
        let probs = outs.last().expect("at least one layer");
        let loss = -libm::log(probs[label].max(f64::MIN_POSITIVE));
        let mut delta = probs.clone();
        delta[label] -= 1.0;
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let gw = &mut grads.weights[l];
            for (gb, d) in grads.bias[l].iter_mut().zip(&delta) {
                *gb += d;
            }
            if l == 0 {
                for (o, d) in delta.iter().enumerate() {
                    let base = o * layer.inputs;
                    for (i, v) in x.iter() {
                        gw[base + i] += d * v;
                    }
                }
                break;
            }
            let input = &outs[l - 1];
            for (o, d) in delta.iter().enumerate() {
                let base = o * layer.inputs;
                for (i, a) in input.iter().enumerate() {
                    gw[base + i] += d * a;
                }
            }
            let act = self.params.activation;
            delta = (0..layer.inputs)
                .map(|i| {
                    let back: f64 = delta
                        .iter()
                        .enumerate()
                        .map(|(o, d)| layer.weights[o * layer.inputs + i] * d)
                        .sum();
                    back * act.derivative(input[i])
                })
                .collect();
        }
        loss
    }

    fn apply_update(&mut self, grads: &mut Gradients, step: f64, first_layer_columns: &[usize]) {
        for (l, layer) in self.layers.iter_mut().enumerate() {
            let gw = &mut grads.weights[l];
            if l == 0 {
                for o in 0..layer.outputs {
                    let base = o * layer.inputs;
                    for &i in first_layer_columns {
                        layer.weights[base + i] -= step * gw[base + i];
                        gw[base + i] = 0.0;
                    }
                }
            } else {
                for (w, g) in layer.weights.iter_mut().zip(gw.iter_mut()) {
                    *w -= step * *g;
                    *g = 0.0;
                }
            }
            for (b, g) in layer.bias.iter_mut().zip(grads.bias[l].iter_mut()) {
                *b -= step * *g;
                *g = 0.0;
            }
        }
    }

    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        self.forward(&SparseVector::from_dense(x))
            .pop()
            .expect("at least one layer")
    }

    /// Number of trainable parameters.
    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// All parameters flattened: per layer, weights (row-major) then bias.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_parameters(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.parameter_count(), "parameter vector length");
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&flat[at..at + nw]);
            at += nw;
            let nb = l.bias.len();
            l.bias.copy_from_slice(&flat[at..at + nb]);
            at += nb;
        }
    }

    /// Mean cross-entropy over `matrix` and its gradient, flattened like
    /// [`Mlp::parameters`].
    pub fn loss_and_gradient(&self, matrix: &FeatureMatrix) -> (f64, Vec<f64>) {
        let mut grads = Gradients::zeros(&self.layers);
        let mut loss = 0.0;
        for (x, &label) in matrix.rows().iter().zip(matrix.labels()) {
            loss += self.accumulate(x, label, &mut grads);
        }
        let n = matrix.len() as f64;
        let mut flat = Vec::with_capacity(self.parameter_count());
        for (gw, gb) in grads.weights.iter().zip(&grads.bias) {
            flat.extend(gw.iter().map(|g| g / n));
            flat.extend(gb.iter().map(|g| g / n));
        }
        (loss / n, flat)
    }

    /// Mean cross-entropy over `matrix`.
    pub fn loss(&self, matrix: &FeatureMatrix) -> f64 {
        let total: f64 = matrix
            .rows()
            .iter()
            .zip(matrix.labels())
            .map(|(x, &label)| {
                let p = self.forward(x).pop().expect("at least one layer");
                -libm::log(p[label].max(f64::MIN_POSITIVE))
            })
            .sum();
        total / matrix.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> FeatureMatrix {
        FeatureMatrix::from_dense(
            &[vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
            vec![0, 1, 1, 0],
            ["neg", "pos"],
        )
        .unwrap()
    }

    #[test]
    fn zero_epochs_gives_normalized_initial_scores() {
        let params = MlpParams {
            epochs: 0,
            ..MlpParams::default()
        };
        let net = Mlp::fit(&xor(), &params, 9).unwrap();
        let mut rng = SplitMix64::new(9);
        let fresh = Mlp::init(2, 2, &params, &mut rng).unwrap();
        assert_eq!(net, fresh);
        for x in [[0.0, 0.0], [1.0, 1.0], [3.0, -2.0]] {
            let p = net.probabilities(&x);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn init_range() {
        let mut rng = SplitMix64::new(1);
        let net = Mlp::init(10, 2, &MlpParams { hidden: vec![6], ..MlpParams::default() }, &mut rng).unwrap();
        let r0 = (6.0f64 / 16.0).sqrt();
        assert!(net.layers()[0].weights().iter().all(|w| w.abs() <= r0));
        assert!(net.layers()[0].bias().iter().all(|b| *b == 0.0));
        assert_eq!(net.parameter_count(), 10 * 6 + 6 + 6 * 2 + 2);
    }

    #[test]
    fn rejects_zero_width_and_no_hidden() {
        let m = xor();
        assert!(Mlp::fit(&m, &MlpParams { hidden: vec![4, 0], ..MlpParams::default() }, 0).is_err());
        assert!(Mlp::fit(&m, &MlpParams { hidden: vec![], ..MlpParams::default() }, 0).is_err());
    }

    #[test]
    fn parameters_round_trip() {
        let mut rng = SplitMix64::new(4);
        let mut net = Mlp::init(3, 2, &MlpParams { hidden: vec![2], ..MlpParams::default() }, &mut rng).unwrap();
        let mut p = net.parameters();
        p[0] = 0.25;
        net.set_parameters(&p);
        assert_eq!(net.parameters(), p);
        assert_eq!(net.layers()[0].weights()[0], 0.25);
    }

    #[test]
    fn training_reduces_loss() {
        let m = xor();
        let params = MlpParams {
            hidden: vec![4],
            learning_rate: 0.5,
            epochs: 300,
            ..MlpParams::default()
        };
        let before = Mlp::fit(&m, &MlpParams { epochs: 0, ..params.clone() }, 2).unwrap().loss(&m);
        let after = Mlp::fit(&m, &params, 2).unwrap().loss(&m);
        assert!(after < before);
    }
}
