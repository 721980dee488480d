//! Minimal dense feed-forward network: layers, activations and their
//! derivatives, forward pass, backpropagation, binary cross-entropy loss,
//! Adam, and accuracy evaluation.
//!
//! The pre-activation of a neuron is `s = u . w + b` and its output is
//! `x = f(s)`. Backpropagation records `delta = dL/ds` per neuron; the
//! scaling machinery consumes those deltas directly.

mod adam;
pub mod io;

pub use adam::{Adam, AdamHyper};

use ndarray::{Array1, Array2, Axis};
use thiserror::Error;

use crate::numerics::Rng;

/// Outputs are clamped into [BCE_CLAMP, 1 - BCE_CLAMP] before logs.
const BCE_CLAMP: f64 = 1e-12;

/// Rows per chunk for whole-dataset evaluation passes.
const EVAL_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NnError {
    #[error("{what}: expected {expected}, got {got}")]
    DimMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("network must contain at least one layer")]
    EmptyNetwork,
    #[error("layer has non-finite weights or biases")]
    NonFiniteParams,
    #[error("layer dimensions must be at least 1x1")]
    DegenerateLayer,
    #[error("step activation has zero derivative and cannot be trained")]
    StepNotTrainable,
    #[error("invalid batch: {0}")]
    InvalidBatch(String),
    #[error("backprop record does not match this network")]
    RecordMismatch,
}

/// Activation function family of a layer.
///
/// `Step` is inference-only: its derivative is 0 everywhere, and training
/// a network containing a step layer is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActivationKind {
    Linear,
    Relu,
    Sigmoid,
    Tanh,
    Step,
}

impl ActivationKind {
    pub fn apply(self, s: f64) -> f64 {
        match self {
            ActivationKind::Linear => s,
            ActivationKind::Relu => s.max(0.0),
            ActivationKind::Sigmoid => 1.0 / (1.0 + (-s).exp()),
            ActivationKind::Tanh => s.tanh(),
            // boundary convention: the step fires at exactly 0
            ActivationKind::Step => {
                if s >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn derivative(self, s: f64) -> f64 {
        match self {
            ActivationKind::Linear => 1.0,
            // subgradient convention: derivative at the kink is 0
            ActivationKind::Relu => {
                if s > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Sigmoid => {
                let f = 1.0 / (1.0 + (-s).exp());
                f * (1.0 - f)
            }
            ActivationKind::Tanh => {
                let t = s.tanh();
                1.0 - t * t
            }
            ActivationKind::Step => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Linear => "linear",
            ActivationKind::Relu => "relu",
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Tanh => "tanh",
            ActivationKind::Step => "step",
        }
    }
}

impl std::str::FromStr for ActivationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(ActivationKind::Linear),
            "relu" => Ok(ActivationKind::Relu),
            "sigmoid" => Ok(ActivationKind::Sigmoid),
            "tanh" => Ok(ActivationKind::Tanh),
            "step" => Ok(ActivationKind::Step),
            other => Err(format!("unknown activation '{other}'")),
        }
    }
}

/// One dense layer: `M x N` weights, `M` biases, one activation.
///
/// Weights are in normalized conductance-difference units and therefore
/// dimensionless.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: ActivationKind,
}

impl DenseLayer {
    pub fn new(
        weights: Array2<f64>,
        bias: Array1<f64>,
        activation: ActivationKind,
    ) -> Result<Self, NnError> {
        let (m, n) = weights.dim();
        if m == 0 || n == 0 {
            return Err(NnError::DegenerateLayer);
        }
        if bias.len() != m {
            return Err(NnError::DimMismatch {
                what: "bias length",
                expected: m,
                got: bias.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) || bias.iter().any(|b| !b.is_finite()) {
            return Err(NnError::NonFiniteParams);
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    /// Number of neurons (output dimension).
    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }
}

/// An ordered stack of dense layers; layer `i` feeds layer `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layers: Vec<DenseLayer>,
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self, NnError> {
        if layers.is_empty() {
            return Err(NnError::EmptyNetwork);
        }
        for pair in layers.windows(2) {
            if pair[1].input_dim() != pair[0].output_dim() {
                return Err(NnError::DimMismatch {
                    what: "layer chaining",
                    expected: pair[0].output_dim(),
                    got: pair[1].input_dim(),
                });
            }
        }
        Ok(Self { layers })
    }

    /// Glorot-uniform initialization: weights in
    /// `[-sqrt(6/(N+M)), +sqrt(6/(N+M))]` drawn row-major layer by layer,
    /// biases zero.
    pub fn glorot(
        dims: &[usize],
        activations: &[ActivationKind],
        rng: &mut Rng,
    ) -> Result<Self, NnError> {
        if dims.len() < 2 || activations.len() != dims.len() - 1 {
            return Err(NnError::EmptyNetwork);
        }
        let mut layers = Vec::with_capacity(activations.len());
        for (i, &act) in activations.iter().enumerate() {
            let (n, m) = (dims[i], dims[i + 1]);
            let limit = (6.0 / (n + m) as f64).sqrt();
            let weights = Array2::from_shape_fn((m, n), |_| rng.uniform(-limit, limit));
            layers.push(DenseLayer::new(weights, Array1::zeros(m), act)?);
        }
        Network::new(layers)
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    /// Total neuron count across all layers.
    pub fn neuron_count(&self) -> usize {
        self.layers.iter().map(|l| l.output_dim()).sum()
    }

    pub fn trainable(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.activation != ActivationKind::Step)
    }

    /// Forward pass over a batch, retaining per-layer pre-activations and
    /// activations for backpropagation.
    pub fn forward(&self, inputs: &Array2<f64>) -> Result<BackpropRecord, NnError> {
        if inputs.ncols() != self.input_dim() {
            return Err(NnError::DimMismatch {
                what: "input columns",
                expected: self.input_dim(),
                got: inputs.ncols(),
            });
        }
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut act = Vec::with_capacity(self.layers.len());
        let mut current = inputs.clone();
        for layer in &self.layers {
            let s = current.dot(&layer.weights.t()) + &layer.bias;
            let x = s.mapv(|v| layer.activation.apply(v));
            pre.push(s);
            current = x.clone();
            act.push(x);
        }
        Ok(BackpropRecord {
            inputs: inputs.clone(),
            pre_activations: pre,
            activations: act,
            deltas: Vec::new(),
        })
    }

    /// Outputs only, evaluated in chunks so whole-dataset passes do not
    /// retain per-layer intermediates.
    pub fn predict(&self, inputs: &Array2<f64>) -> Result<Array2<f64>, NnError> {
        if inputs.ncols() != self.input_dim() {
            return Err(NnError::DimMismatch {
                what: "input columns",
                expected: self.input_dim(),
                got: inputs.ncols(),
            });
        }
        let p = inputs.nrows();
        let mut out = Array2::zeros((p, self.output_dim()));
        let mut row = 0;
        while row < p {
            let end = (row + EVAL_CHUNK).min(p);
            let mut current = inputs.slice(ndarray::s![row..end, ..]).to_owned();
            for layer in &self.layers {
                let s = current.dot(&layer.weights.t()) + &layer.bias;
                current = s.mapv(|v| layer.activation.apply(v));
            }
            out.slice_mut(ndarray::s![row..end, ..]).assign(&current);
            row = end;
        }
        Ok(out)
    }
}

/// A batch of samples: inputs are voltages normalized to `[0, 1]`,
/// targets are one-hot rows.
#[derive(Debug, Clone)]
pub struct Batch {
    inputs: Array2<f64>,
    targets: Array2<f64>,
}

impl Batch {
    pub fn new(inputs: Array2<f64>, targets: Array2<f64>) -> Result<Self, NnError> {
        if inputs.nrows() != targets.nrows() {
            return Err(NnError::InvalidBatch(format!(
                "{} input rows vs {} target rows",
                inputs.nrows(),
                targets.nrows()
            )));
        }
        if inputs.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(NnError::InvalidBatch(
                "input entries must lie in [0, 1]".into(),
            ));
        }
        for (i, row) in targets.rows().into_iter().enumerate() {
            if row.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(NnError::InvalidBatch(format!(
                    "target row {i} has entries outside [0, 1]"
                )));
            }
            let sum: f64 = row.sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(NnError::InvalidBatch(format!(
                    "target row {i} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(Self { inputs, targets })
    }

    pub fn inputs(&self) -> &Array2<f64> {
        &self.inputs
    }

    pub fn targets(&self) -> &Array2<f64> {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn class_count(&self) -> usize {
        self.targets.ncols()
    }

    /// Gather the given sample rows into a new batch.
    pub fn select(&self, indices: &[usize]) -> Batch {
        Batch {
            inputs: self.inputs.select(Axis(0), indices),
            targets: self.targets.select(Axis(0), indices),
        }
    }
}

/// Per-layer pre-activations `s`, activations `x`, and (after a backward
/// pass) deltas `dL/ds`, all `P x M_layer`.
#[derive(Debug, Clone)]
pub struct BackpropRecord {
    inputs: Array2<f64>,
    pre_activations: Vec<Array2<f64>>,
    activations: Vec<Array2<f64>>,
    deltas: Vec<Array2<f64>>,
}

impl BackpropRecord {
    pub fn outputs(&self) -> &Array2<f64> {
        self.activations.last().expect("record has layers")
    }

    pub fn pre_activations(&self, layer: usize) -> &Array2<f64> {
        &self.pre_activations[layer]
    }

    pub fn activations(&self, layer: usize) -> &Array2<f64> {
        &self.activations[layer]
    }

    /// Input seen by `layer`: the batch inputs for layer 0, the previous
    /// layer's activations otherwise.
    pub fn layer_input(&self, layer: usize) -> &Array2<f64> {
        if layer == 0 {
            &self.inputs
        } else {
            &self.activations[layer - 1]
        }
    }

    /// Deltas of `layer`; empty slice access panics unless a backward
    /// pass has filled them.
    pub fn deltas(&self, layer: usize) -> &Array2<f64> {
        &self.deltas[layer]
    }

    pub fn has_deltas(&self) -> bool {
        !self.deltas.is_empty()
    }

    pub fn sample_count(&self) -> usize {
        self.inputs.nrows()
    }
}

/// Loss used for training and for the backward pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// Per-class binary cross-entropy, averaged over samples.
    Bce,
    /// Half squared error `1/2 (x - t)^2`, averaged over samples.
    HalfSquaredError,
}

impl Loss {
    pub fn evaluate(self, outputs: &Array2<f64>, targets: &Array2<f64>) -> Result<f64, NnError> {
        match self {
            Loss::Bce => loss_bce(outputs, targets),
            Loss::HalfSquaredError => {
                check_same_shape(outputs, targets)?;
                let p = outputs.nrows() as f64;
                let mut total = 0.0;
                for (x, t) in outputs.iter().zip(targets.iter()) {
                    let d = x - t;
                    total += 0.5 * d * d;
                }
                Ok(total / p)
            }
        }
    }
}

fn check_same_shape(a: &Array2<f64>, b: &Array2<f64>) -> Result<(), NnError> {
    if a.dim() != b.dim() {
        return Err(NnError::DimMismatch {
            what: "output/target shape",
            expected: b.len(),
            got: a.len(),
        });
    }
    Ok(())
}

/// Mean over samples of the summed per-class binary cross-entropy
/// `-[t ln x + (1 - t) ln(1 - x)]`.
///
/// Outputs are clamped away from 0 and 1 before the logs.
pub fn loss_bce(outputs: &Array2<f64>, targets: &Array2<f64>) -> Result<f64, NnError> {
    check_same_shape(outputs, targets)?;
    let p = outputs.nrows() as f64;
    let mut total = 0.0;
    for (x, t) in outputs.iter().zip(targets.iter()) {
        let x = x.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
        total -= t * x.ln() + (1.0 - t) * (1.0 - x).ln();
    }
    Ok(total / p)
}

/// Per-layer parameter gradients. `d_weights` is empty when produced by
/// [`backward_biases`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub d_weights: Vec<Array2<f64>>,
    pub d_bias: Vec<Array1<f64>>,
}

/// Reverse-mode pass. Fills `record.deltas` (one `P x M` matrix per
/// layer) and returns weight and bias gradients of the mean loss.
pub fn backward(
    net: &Network,
    record: &mut BackpropRecord,
    targets: &Array2<f64>,
    loss: Loss,
) -> Result<Gradients, NnError> {
    backward_impl(net, record, targets, loss, true)
}

/// Like [`backward`] but skips the weight-gradient matrix products;
/// used when only biases are being tuned.
pub fn backward_biases(
    net: &Network,
    record: &mut BackpropRecord,
    targets: &Array2<f64>,
    loss: Loss,
) -> Result<Gradients, NnError> {
    backward_impl(net, record, targets, loss, false)
}

fn backward_impl(
    net: &Network,
    record: &mut BackpropRecord,
    targets: &Array2<f64>,
    loss: Loss,
    with_weight_grads: bool,
) -> Result<Gradients, NnError> {
    if !net.trainable() {
        return Err(NnError::StepNotTrainable);
    }
    let n_layers = net.layers.len();
    if record.activations.len() != n_layers {
        return Err(NnError::RecordMismatch);
    }
    check_same_shape(record.outputs(), targets)?;
    let p = targets.nrows() as f64;

    let mut deltas: Vec<Array2<f64>> = vec![Array2::zeros((0, 0)); n_layers];

    // output layer
    let out_idx = n_layers - 1;
    let out_act = net.layers[out_idx].activation;
    let x = &record.activations[out_idx];
    let s = &record.pre_activations[out_idx];
    deltas[out_idx] = match (loss, out_act) {
        // sigmoid + BCE collapse: dL/ds = x - t
        (Loss::Bce, ActivationKind::Sigmoid) => (x - targets) / p,
        (Loss::Bce, act) => {
            let mut d = Array2::zeros(x.raw_dim());
            ndarray::Zip::from(&mut d)
                .and(x)
                .and(targets)
                .and(s)
                .for_each(|d, &x, &t, &s| {
                    let xc = x.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
                    let dl_dx = (xc - t) / (xc * (1.0 - xc));
                    *d = dl_dx * act.derivative(s) / p;
                });
            d
        }
        (Loss::HalfSquaredError, act) => {
            let mut d = (x - targets) / p;
            ndarray::Zip::from(&mut d).and(s).for_each(|d, &s| {
                *d *= act.derivative(s);
            });
            d
        }
    };

    // hidden layers
    for l in (0..out_idx).rev() {
        let propagated = deltas[l + 1].dot(&net.layers[l + 1].weights);
        let s = &record.pre_activations[l];
        let act = net.layers[l].activation;
        let mut d = propagated;
        ndarray::Zip::from(&mut d).and(s).for_each(|d, &s| {
            *d *= act.derivative(s);
        });
        deltas[l] = d;
    }

    let mut d_weights = Vec::new();
    let mut d_bias = Vec::with_capacity(n_layers);
    for l in 0..n_layers {
        if with_weight_grads {
            d_weights.push(deltas[l].t().dot(record.layer_input(l)));
        }
        d_bias.push(deltas[l].sum_axis(Axis(0)));
    }

    record.deltas = deltas;
    Ok(Gradients { d_weights, d_bias })
}

/// Index of the largest entry; ties break toward the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &v) in row.iter().enumerate() {
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    best
}

/// Fraction of samples whose predicted argmax matches the target argmax.
pub fn accuracy(net: &Network, batch: &Batch) -> Result<f64, NnError> {
    if net.output_dim() != batch.class_count() {
        return Err(NnError::DimMismatch {
            what: "output classes",
            expected: batch.class_count(),
            got: net.output_dim(),
        });
    }
    if batch.is_empty() {
        return Err(NnError::InvalidBatch("empty batch".into()));
    }
    let outputs = net.predict(batch.inputs())?;
    let mut correct = 0usize;
    for (out_row, t_row) in outputs.rows().into_iter().zip(batch.targets().rows()) {
        let pred = argmax(out_row.as_slice().expect("contiguous row"));
        let truth = argmax(t_row.as_slice().expect("contiguous row"));
        if pred == truth {
            correct += 1;
        }
    }
    Ok(correct as f64 / batch.len() as f64)
}

/// Mean loss of the network over a whole batch, evaluated in chunks.
pub fn evaluate_loss(net: &Network, batch: &Batch, loss: Loss) -> Result<f64, NnError> {
    let p = batch.len();
    if p == 0 {
        return Err(NnError::InvalidBatch("empty batch".into()));
    }
    let mut total = 0.0;
    let mut row = 0;
    while row < p {
        let end = (row + EVAL_CHUNK).min(p);
        let outputs = net.predict(&batch.inputs().slice(ndarray::s![row..end, ..]).to_owned())?;
        let targets = batch.targets().slice(ndarray::s![row..end, ..]).to_owned();
        total += loss.evaluate(&outputs, &targets)? * (end - row) as f64;
        row = end;
    }
    Ok(total / p as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn single_layer(w: Array2<f64>, b: Array1<f64>, act: ActivationKind) -> Network {
        Network::new(vec![DenseLayer::new(w, b, act).unwrap()]).unwrap()
    }

    #[test]
    fn activation_values() {
        assert_eq!(ActivationKind::Sigmoid.apply(0.0), 0.5);
        assert_eq!(ActivationKind::Relu.apply(-3.0), 0.0);
        assert_eq!(ActivationKind::Step.apply(0.0), 1.0);
        assert_eq!(ActivationKind::Step.apply(-1e-12), 0.0);
        assert_eq!(ActivationKind::Linear.apply(2.5), 2.5);
        assert!((ActivationKind::Tanh.apply(1.0) - 1.0f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn activation_derivatives() {
        assert_eq!(ActivationKind::Sigmoid.derivative(0.0), 0.25);
        assert_eq!(ActivationKind::Tanh.derivative(0.0), 1.0);
        assert_eq!(ActivationKind::Relu.derivative(0.0), 0.0);
        assert_eq!(ActivationKind::Relu.derivative(1.0), 1.0);
        assert_eq!(ActivationKind::Step.derivative(5.0), 0.0);
        assert_eq!(ActivationKind::Linear.derivative(-3.0), 1.0);
    }

    #[test]
    fn forward_single_linear_neuron() {
        let net = single_layer(array![[1.0, 1.0]], array![0.0], ActivationKind::Linear);
        let rec = net.forward(&array![[0.5, 0.5]]).unwrap();
        assert_eq!(rec.pre_activations(0)[[0, 0]], 1.0);
        assert_eq!(rec.outputs()[[0, 0]], 1.0);
    }

    #[test]
    fn forward_zero_net_sigmoid_is_half() {
        let net = single_layer(
            Array2::zeros((3, 4)),
            Array1::zeros(3),
            ActivationKind::Sigmoid,
        );
        let rec = net.forward(&array![[0.1, 0.9, 0.3, 0.7]]).unwrap();
        for &x in rec.outputs() {
            assert_eq!(x, 0.5);
        }
    }

    #[test]
    fn forward_cancellation() {
        let net = single_layer(array![[2.0]], array![-1.0], ActivationKind::Sigmoid);
        let rec = net.forward(&array![[0.5]]).unwrap();
        assert_eq!(rec.pre_activations(0)[[0, 0]], 0.0);
        assert_eq!(rec.outputs()[[0, 0]], 0.5);
    }

    #[test]
    fn forward_shape_error() {
        let net = single_layer(array![[1.0, 1.0]], array![0.0], ActivationKind::Linear);
        assert!(net.forward(&array![[1.0, 2.0, 3.0]]).is_err());
    }

    #[test]
    fn forward_linear_scaling_bookkeeping() {
        // scaling all inputs of a linear layer by c scales s - b by c exactly
        let w = array![[0.3, -0.7, 0.2]];
        let b = array![0.4];
        let net = single_layer(w, b.clone(), ActivationKind::Linear);
        let u = array![[0.2, 0.5, 0.9]];
        let c = 0.5;
        let s1 = net.forward(&u).unwrap().pre_activations(0)[[0, 0]];
        let s2 = net.forward(&(&u * c)).unwrap().pre_activations(0)[[0, 0]];
        assert!(((s2 - b[0]) - c * (s1 - b[0])).abs() < 1e-15);
    }

    #[test]
    fn bce_closed_forms() {
        let ln2 = std::f64::consts::LN_2;
        let l = loss_bce(&array![[0.5]], &array![[1.0]]).unwrap();
        assert!((l - ln2).abs() < 1e-12);

        let outputs = Array2::from_elem((1, 10), 0.5);
        let mut targets = Array2::zeros((1, 10));
        targets[[0, 3]] = 1.0;
        let l = loss_bce(&outputs, &targets).unwrap();
        assert!((l - 10.0 * ln2).abs() < 1e-12);
    }

    #[test]
    fn bce_perfect_prediction_is_zero() {
        let outputs = array![[1.0 - 1e-12, 1e-12]];
        let targets = array![[1.0, 0.0]];
        let l = loss_bce(&outputs, &targets).unwrap();
        assert!(l >= 0.0 && l < 1e-10);
    }

    #[test]
    fn bce_clamps_exact_zero_one() {
        let l = loss_bce(&array![[0.0, 1.0]], &array![[1.0, 0.0]]).unwrap();
        assert!(l.is_finite() && l > 0.0);
    }

    #[test]
    fn bce_nonnegative() {
        let l = loss_bce(&array![[0.3, 0.8]], &array![[0.0, 1.0]]).unwrap();
        assert!(l >= 0.0);
    }

    #[test]
    fn backward_zero_gradient_at_optimum() {
        let net = single_layer(array![[0.5, -0.5]], array![0.1], ActivationKind::Sigmoid);
        let u = array![[0.3, 0.6]];
        let mut rec = net.forward(&u).unwrap();
        let targets = rec.outputs().clone();
        let grads = backward(&net, &mut rec, &targets, Loss::Bce).unwrap();
        for g in &grads.d_bias {
            for &v in g {
                assert!(v.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn backward_hand_chain_rule() {
        // single linear neuron, half squared error, u=1, w=1, b=0, t=0:
        // x = 1, delta = x - t = 1, dL/dw = delta * u = 1
        let net = single_layer(array![[1.0]], array![0.0], ActivationKind::Linear);
        let mut rec = net.forward(&array![[1.0]]).unwrap();
        let grads = backward(&net, &mut rec, &array![[0.0]], Loss::HalfSquaredError).unwrap();
        assert!((rec.deltas(0)[[0, 0]] - 1.0).abs() < 1e-15);
        assert!((grads.d_weights[0][[0, 0]] - 1.0).abs() < 1e-15);
        assert!((grads.d_bias[0][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn backward_rejects_step() {
        let net = single_layer(array![[1.0]], array![0.0], ActivationKind::Step);
        let mut rec = net.forward(&array![[1.0]]).unwrap();
        let err = backward(&net, &mut rec, &array![[1.0]], Loss::Bce).unwrap_err();
        assert_eq!(err, NnError::StepNotTrainable);
    }

    #[test]
    fn backward_biases_skips_weight_grads() {
        let net = single_layer(array![[1.0, 2.0]], array![0.5], ActivationKind::Sigmoid);
        let mut rec = net.forward(&array![[0.5, 0.5]]).unwrap();
        let g_full = backward(&net, &mut rec.clone(), &array![[1.0]], Loss::Bce).unwrap();
        let g_bias = backward_biases(&net, &mut rec, &array![[1.0]], Loss::Bce).unwrap();
        assert!(g_bias.d_weights.is_empty());
        assert_eq!(g_full.d_bias[0][0], g_bias.d_bias[0][0]);
    }

    #[test]
    fn batch_validation() {
        assert!(Batch::new(array![[0.5]], array![[1.0]]).is_ok());
        assert!(Batch::new(array![[1.5]], array![[1.0]]).is_err());
        assert!(Batch::new(array![[-0.1]], array![[1.0]]).is_err());
        assert!(Batch::new(array![[0.5]], array![[0.4, 0.4]]).is_err());
        assert!(Batch::new(array![[0.5]], array![[0.5, 0.5]]).is_ok());
        assert!(Batch::new(array![[0.5], [0.5]], array![[1.0]]).is_err());
    }

    #[test]
    fn accuracy_perfect_and_chance() {
        let net = single_layer(
            array![[1.0, 0.0], [0.0, 1.0]],
            array![0.0, 0.0],
            ActivationKind::Linear,
        );
        let batch = Batch::new(
            array![[1.0, 0.0], [0.0, 1.0]],
            array![[1.0, 0.0], [0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(accuracy(&net, &batch).unwrap(), 1.0);

        // all-zero outputs: argmax ties resolve to class 0
        let zero_net = single_layer(
            Array2::zeros((10, 4)),
            Array1::zeros(10),
            ActivationKind::Linear,
        );
        let p = 10;
        let inputs = Array2::from_elem((p, 4), 0.5);
        let mut targets = Array2::zeros((p, 10));
        for i in 0..p {
            targets[[i, i % 10]] = 1.0;
        }
        let batch = Batch::new(inputs, targets).unwrap();
        let acc = accuracy(&zero_net, &batch).unwrap();
        assert!((acc - 0.1).abs() < 1e-12);
    }

    #[test]
    fn argmax_tie_breaks_low() {
        assert_eq!(argmax(&[1.0, 1.0, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 0.9, 0.9]), 1);
    }

    #[test]
    fn glorot_is_seeded_and_bounded() {
        let mut rng = crate::numerics::Rng::new(11);
        let a = Network::glorot(
            &[4, 3],
            &[ActivationKind::Sigmoid],
            &mut rng,
        )
        .unwrap();
        let mut rng2 = crate::numerics::Rng::new(11);
        let b = Network::glorot(
            &[4, 3],
            &[ActivationKind::Sigmoid],
            &mut rng2,
        )
        .unwrap();
        assert_eq!(a, b);
        let limit = (6.0 / 7.0f64).sqrt();
        assert!(a.layers[0].weights.iter().all(|w| w.abs() <= limit));
        assert!(a.layers[0].bias.iter().all(|&b| b == 0.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // argmax (and therefore accuracy) is invariant under strictly
            // monotone transformations of an output row
            #[test]
            fn argmax_monotone_invariance(
                row in proptest::collection::vec(-10.0f64..10.0, 2..12),
                scale in 0.1f64..5.0,
                shift in -3.0f64..3.0,
            ) {
                let base = argmax(&row);
                let transformed: Vec<f64> =
                    row.iter().map(|&v| scale * v + shift).collect();
                prop_assert_eq!(argmax(&transformed), base);
                let exp: Vec<f64> = row.iter().map(|&v| (v * 0.3).exp()).collect();
                prop_assert_eq!(argmax(&exp), base);
            }

            #[test]
            fn bce_nonnegative_prop(
                x in proptest::collection::vec(0.0f64..1.0, 1..8),
            ) {
                let n = x.len();
                let outputs = Array2::from_shape_vec((1, n), x).unwrap();
                let mut targets = Array2::zeros((1, n));
                targets[[0, 0]] = 1.0;
                prop_assert!(loss_bce(&outputs, &targets).unwrap() >= 0.0);
            }
        }
    }
}
