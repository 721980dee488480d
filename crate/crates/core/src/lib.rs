//! Synaptic weight scaling with optimal bias compensation for
//! crossbar-style neural inference.
//!
//! Scaling every weight magnitude of a trained dense network by a factor
//! `epsilon` cuts the conductance-driven power of a crossbar array roughly
//! in proportion, at the cost of shifted neuron operating points. This
//! crate provides the pieces needed to study that tradeoff:
//!
//! - [`numerics`] — Gaussian functions, truncated-normal moments, a
//!   bracketed 1-D minimizer, finite differences, and a seedable RNG.
//! - [`nn`] — a minimal dense feed-forward network: forward pass,
//!   backpropagation, binary cross-entropy loss, Adam, accuracy, and a
//!   binary model container.
//! - [`power`] — the synaptic power proxy of a conductance-pair crossbar
//!   and the normalized average synaptic power (NASP) of a scaled network
//!   against its unscaled baseline.
//! - [`scaling`] — per-neuron pre-activation statistics, closed-form
//!   optimal bias adjustments per activation function, the generic
//!   gradient-weighted adjustment, policy application, and bias-only
//!   retraining.
//! - [`oracle`] — independent brute-force ground truth: sampled optimal
//!   bias curves, Monte-Carlo truncated-normal moments, and quadrature
//!   evaluation of the bias-adjustment integrals.

pub mod numerics;
pub mod nn;
pub mod oracle;
pub mod power;
pub mod scaling;
