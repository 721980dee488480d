//! Adam optimizer with bias correction.

use ndarray::{Array1, Array2};

use super::{Gradients, Network, NnError};

/// Adam hyperparameters; defaults are lr 1e-3, beta1 0.9, beta2 0.999,
/// eps 1e-8.
#[derive(Debug, Clone, Copy)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        Self {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Optimizer state: first/second moment estimates per parameter tensor
/// and the shared timestep.
#[derive(Debug, Clone)]
pub struct Adam {
    hyper: AdamHyper,
    t: u64,
    m_w: Vec<Array2<f64>>,
    v_w: Vec<Array2<f64>>,
    m_b: Vec<Array1<f64>>,
    v_b: Vec<Array1<f64>>,
}

impl Adam {
    pub fn new(net: &Network, hyper: AdamHyper) -> Self {
        let m_w = net
            .layers
            .iter()
            .map(|l| Array2::zeros(l.weights.raw_dim()))
            .collect::<Vec<_>>();
        let v_w = m_w.clone();
        let m_b = net
            .layers
            .iter()
            .map(|l| Array1::zeros(l.bias.len()))
            .collect::<Vec<_>>();
        let v_b = m_b.clone();
        Self {
            hyper,
            t: 0,
            m_w,
            v_w,
            m_b,
            v_b,
        }
    }

    pub fn timestep(&self) -> u64 {
        self.t
    }

    /// One update of all weights and biases.
    pub fn step(&mut self, net: &mut Network, grads: &Gradients) -> Result<(), NnError> {
        if grads.d_weights.len() != net.layers.len() || grads.d_bias.len() != net.layers.len() {
            return Err(NnError::RecordMismatch);
        }
        self.t += 1;
        let (c1, c2) = self.corrections();
        for (l, layer) in net.layers.iter_mut().enumerate() {
            update_tensor(
                layer.weights.as_slice_mut().expect("contiguous weights"),
                grads.d_weights[l].as_slice().expect("contiguous grads"),
                self.m_w[l].as_slice_mut().unwrap(),
                self.v_w[l].as_slice_mut().unwrap(),
                &self.hyper,
                c1,
                c2,
            );
            update_tensor(
                layer.bias.as_slice_mut().expect("contiguous bias"),
                grads.d_bias[l].as_slice().expect("contiguous grads"),
                self.m_b[l].as_slice_mut().unwrap(),
                self.v_b[l].as_slice_mut().unwrap(),
                &self.hyper,
                c1,
                c2,
            );
        }
        Ok(())
    }

    /// One update of the biases only; weights stay untouched.
    pub fn step_biases(&mut self, net: &mut Network, grads: &Gradients) -> Result<(), NnError> {
        if grads.d_bias.len() != net.layers.len() {
            return Err(NnError::RecordMismatch);
        }
        self.t += 1;
        let (c1, c2) = self.corrections();
        for (l, layer) in net.layers.iter_mut().enumerate() {
            update_tensor(
                layer.bias.as_slice_mut().expect("contiguous bias"),
                grads.d_bias[l].as_slice().expect("contiguous grads"),
                self.m_b[l].as_slice_mut().unwrap(),
                self.v_b[l].as_slice_mut().unwrap(),
                &self.hyper,
                c1,
                c2,
            );
        }
        Ok(())
    }

    fn corrections(&self) -> (f64, f64) {
        let t = self.t as i32;
        (
            1.0 - self.hyper.beta1.powi(t),
            1.0 - self.hyper.beta2.powi(t),
        )
    }
}

fn update_tensor(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    h: &AdamHyper,
    c1: f64,
    c2: f64,
) {
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g;
        v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g * g;
        let m_hat = m[i] / c1;
        let v_hat = v[i] / c2;
        params[i] -= h.lr * m_hat / (v_hat.sqrt() + h.eps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{ActivationKind, DenseLayer};
    use ndarray::{array, Array1, Array2};

    fn tiny_net() -> Network {
        Network::new(vec![DenseLayer::new(
            array![[0.5, -0.5]],
            array![0.25],
            ActivationKind::Linear,
        )
        .unwrap()])
        .unwrap()
    }

    fn grads(w: Array2<f64>, b: Array1<f64>) -> Gradients {
        Gradients {
            d_weights: vec![w],
            d_bias: vec![b],
        }
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut net = tiny_net();
        let before = net.clone();
        let mut adam = Adam::new(&net, AdamHyper::default());
        for _ in 0..5 {
            adam.step(&mut net, &grads(Array2::zeros((1, 2)), Array1::zeros(1)))
                .unwrap();
        }
        assert_eq!(net, before);
    }

    #[test]
    fn first_step_magnitude_is_lr() {
        let mut net = tiny_net();
        let w0 = net.layers[0].weights[[0, 0]];
        let mut adam = Adam::new(&net, AdamHyper::default());
        adam.step(&mut net, &grads(array![[3.0, -2.0]], array![1.0]))
            .unwrap();
        // bias-corrected first step is lr * g/|g| up to eps
        let moved = (net.layers[0].weights[[0, 0]] - w0).abs();
        assert!((moved - 0.001).abs() < 1e-6);
    }

    #[test]
    fn hundred_steps_constant_gradient() {
        // frozen from a scalar simulation of the Adam recurrences:
        // constant g = 1, lr = 1e-3, 100 steps moves the parameter by
        // -0.099999999
        let mut net = tiny_net();
        let b0 = net.layers[0].bias[0];
        let mut adam = Adam::new(&net, AdamHyper::default());
        for _ in 0..100 {
            adam.step(
                &mut net,
                &grads(Array2::zeros((1, 2)), Array1::from_elem(1, 1.0)),
            )
            .unwrap();
        }
        let delta = net.layers[0].bias[0] - b0;
        assert!((delta + 0.0999999990).abs() < 1e-7, "delta = {delta}");
    }

    #[test]
    fn step_biases_freezes_weights() {
        let mut net = tiny_net();
        let w_before = net.layers[0].weights.clone();
        let mut adam = Adam::new(&net, AdamHyper::default());
        adam.step_biases(
            &mut net,
            &Gradients {
                d_weights: Vec::new(),
                d_bias: vec![Array1::from_elem(1, 0.7)],
            },
        )
        .unwrap();
        assert_eq!(net.layers[0].weights, w_before);
        assert_ne!(net.layers[0].bias[0], 0.25);
    }

    #[test]
    fn deterministic_given_inputs() {
        let run = || {
            let mut net = tiny_net();
            let mut adam = Adam::new(&net, AdamHyper::default());
            for i in 0..10 {
                let g = 0.1 * i as f64 - 0.3;
                adam.step(
                    &mut net,
                    &grads(Array2::from_elem((1, 2), g), Array1::from_elem(1, -g)),
                )
                .unwrap();
            }
            net
        };
        assert_eq!(run(), run());
    }
}
