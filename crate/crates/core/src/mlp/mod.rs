//! The neural half: a 4 → 32 → 16 → 1 ReLU network trained on squared error.
//!
//! Layout conventions:
//!
//! - Each [`Dense`] layer stores weights row-major with shape `(out, in)`, so
//!   row `i` holds the incoming weights of unit `i`.
//! - Forward pass: `a1 = relu(W1 x + b1)`, `a2 = relu(W2 a1 + b2)`,
//!   `y_hat = W3 a2 + b3`.
//! - The ReLU derivative at exactly zero is taken as 0.
//!
//! The second hidden activation `a2` is the learned feature vector handed to
//! the regression tree; see [`extract_features`].

mod adam;
mod persist;
mod train;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use adam::AdamState;
pub use persist::{load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use train::{train, LossHistory, TrainConfig};

use crate::data::N_FEATURES;
use crate::error::{Error, Result};
use crate::rng;
use crate::symtree::FeatureMatrix;

/// Layer widths. The output layer is always a single unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub inputs: usize,
    pub hidden: [usize; 2],
}

impl Default for Architecture {
    fn default() -> Self {
        Architecture {
            inputs: N_FEATURES,
            hidden: [32, 16],
        }
    }
}

impl Architecture {
    fn shapes(&self) -> [(usize, usize); 3] {
        [
            (self.hidden[0], self.inputs),
            (self.hidden[1], self.hidden[0]),
            (1, self.hidden[1]),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs == 0 || self.hidden.contains(&0) {
            return Err(Error::invalid(format!("layer widths must be >= 1: {self:?}")));
        }
        Ok(())
    }
}

/// A fully connected layer: `rows` outputs, `cols` inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            bias: vec![0.0; rows],
        }
    }

    #[inline]
    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.cols + col]
    }

    #[inline]
    pub fn weight_mut(&mut self, row: usize, col: usize) -> &mut f64 {
        &mut self.weights[row * self.cols + col]
    }

    /// `out = W x + b`
    #[inline]
    fn affine(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (i, (o, row)) in out
            .iter_mut()
            .zip(self.weights.chunks_exact(self.cols))
            .enumerate()
        {
            *o = self.bias[i] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }

    fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// Weights and biases of all three layers.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub layers: [Dense; 3],
}

impl MlpParams {
    pub fn zeros(arch: Architecture) -> Self {
        MlpParams {
            layers: arch.shapes().map(|(r, c)| Dense::zeros(r, c)),
        }
    }

    /// He-uniform weights (bound `sqrt(6 / fan_in)`) and zero biases for the
    /// default 4 → 32 → 16 → 1 shape.
    pub fn init(seed: u64) -> Self {
        Self::init_with(Architecture::default(), seed)
    }

    pub fn init_with(arch: Architecture, seed: u64) -> Self {
        let mut rng = rng::seeded(seed);
        let mut params = Self::zeros(arch);
        for layer in &mut params.layers {
            let bound = (6.0 / layer.cols as f64).sqrt();
            for w in &mut layer.weights {
                *w = rng.random_range(-bound..bound);
            }
        }
        params
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            inputs: self.layers[0].cols,
            hidden: [self.layers[0].rows, self.layers[1].rows],
        }
    }

    pub fn w1(&self) -> &Dense {
        &self.layers[0]
    }

    pub fn w2(&self) -> &Dense {
        &self.layers[1]
    }

    pub fn w3(&self) -> &Dense {
        &self.layers[2]
    }

    /// Number of scalar parameters.
    pub fn len(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All parameters in a fixed order: per layer, weights then bias.
    pub fn values(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()))
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn same_shape(&self, other: &MlpParams) -> bool {
        self.layers
            .iter()
            .zip(&other.layers)
            .all(|(a, b)| a.shape() == b.shape())
    }

    /// Shapes chain (in → h1 → h2 → 1), buffers match shapes, all values finite.
    pub fn validate(&self) -> Result<()> {
        let [l1, l2, l3] = &self.layers;
        if l2.cols != l1.rows || l3.cols != l2.rows || l3.rows != 1 {
            return Err(Error::invalid("layer shapes do not chain to a single output"));
        }
        for l in &self.layers {
            if l.weights.len() != l.rows * l.cols || l.bias.len() != l.rows {
                return Err(Error::invalid("parameter buffer does not match its shape"));
            }
        }
        if self.values().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite parameter"));
        }
        Ok(())
    }

    /// Full forward pass for one input.
    pub fn forward(&self, x: &[f64]) -> ForwardTrace {
        let [l1, l2, l3] = &self.layers;
        let mut a1 = vec![0.0; l1.rows];
        let mut a2 = vec![0.0; l2.rows];
        let mut out = [0.0];
        l1.affine(x, &mut a1);
        relu(&mut a1);
        l2.affine(&a1, &mut a2);
        relu(&mut a2);
        l3.affine(&a2, &mut out);
        ForwardTrace {
            a1,
            a2,
            y_hat: out[0],
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.forward(x).y_hat
    }

    pub fn predict_all<X: AsRef<[f64]>>(&self, xs: &[X]) -> Vec<f64> {
        xs.iter().map(|x| self.predict(x.as_ref())).collect()
    }
}

#[inline]
fn relu(v: &mut [f64]) {
    for x in v {
        // `max` would keep -0.0 and NaN quirks; this keeps exact zeros.
        if *x <= 0.0 || x.is_nan() {
            *x = 0.0;
        }
    }
}

/// Activations of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub y_hat: f64,
}

/// Partial derivatives of a batch loss, laid out like [`MlpParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub MlpParams);

impl Gradients {
    pub fn zeros_like(params: &MlpParams) -> Self {
        Gradients(MlpParams::zeros(params.architecture()))
    }

    pub fn params(&self) -> &MlpParams {
        &self.0
    }

    pub fn values(&self) -> impl Iterator<Item = &f64> {
        self.0.values()
    }

    fn clear(&mut self) {
        self.0.values_mut().for_each(|g| *g = 0.0);
    }
}

/// Reusable buffers for per-sample backprop.
struct Scratch {
    a1: Vec<f64>,
    a2: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Scratch {
    fn new(params: &MlpParams) -> Self {
        let [h1, h2] = params.architecture().hidden;
        Scratch {
            a1: vec![0.0; h1],
            a2: vec![0.0; h2],
            d1: vec![0.0; h1],
            d2: vec![0.0; h2],
        }
    }
}

/// Adds `scale * d(residual²)/dθ` for one sample into `grads`; returns the
/// squared residual.
fn accumulate_sample(
    params: &MlpParams,
    x: &[f64],
    y: f64,
    scale: f64,
    grads: &mut Gradients,
    s: &mut Scratch,
) -> f64 {
    let [l1, l2, l3] = &params.layers;
    l1.affine(x, &mut s.a1);
    relu(&mut s.a1);
    l2.affine(&s.a1, &mut s.a2);
    relu(&mut s.a2);
    let mut out = [0.0];
    l3.affine(&s.a2, &mut out);
    let residual = out[0] - y;

    let [g1, g2, g3] = &mut grads.0.layers;

    // output layer
    let d3 = 2.0 * residual * scale;
    g3.bias[0] += d3;
    for (g, a) in g3.weights.iter_mut().zip(&s.a2) {
        *g += d3 * a;
    }

    // second hidden layer
    for (j, d) in s.d2.iter_mut().enumerate() {
        *d = if s.a2[j] > 0.0 { d3 * l3.weights[j] } else { 0.0 };
    }
    for (j, &d) in s.d2.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        g2.bias[j] += d;
        let row = &mut g2.weights[j * g2.cols..(j + 1) * g2.cols];
        for (g, a) in row.iter_mut().zip(&s.a1) {
            *g += d * a;
        }
    }

    // first hidden layer
    s.d1.iter_mut().for_each(|d| *d = 0.0);
    for (j, &d) in s.d2.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        let row = &l2.weights[j * l2.cols..(j + 1) * l2.cols];
        for (acc, w) in s.d1.iter_mut().zip(row) {
            *acc += d * w;
        }
    }
    for (k, d) in s.d1.iter_mut().enumerate() {
        if s.a1[k] <= 0.0 {
            *d = 0.0;
        }
    }
    for (k, &d) in s.d1.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        g1.bias[k] += d;
        let row = &mut g1.weights[k * g1.cols..(k + 1) * g1.cols];
        for (g, v) in row.iter_mut().zip(x) {
            *g += d * v;
        }
    }

    residual * residual
}

/// Fill `grads` with the gradient of the batch mean squared error; returns the loss.
fn backward_into<X: AsRef<[f64]>>(
    params: &MlpParams,
    batch_x: &[X],
    batch_y: &[f64],
    grads: &mut Gradients,
    scratch: &mut Scratch,
) -> f64 {
    grads.clear();
    let scale = 1.0 / batch_x.len() as f64;
    let total: f64 = batch_x
        .iter()
        .zip(batch_y)
        .map(|(x, &y)| accumulate_sample(params, x.as_ref(), y, scale, grads, scratch))
        .sum();
    total * scale
}

/// Exact gradient of `mean((y - y_hat)²)` over the batch, and that loss.
pub fn backward<X: AsRef<[f64]>>(
    params: &MlpParams,
    batch_x: &[X],
    batch_y: &[f64],
) -> Result<(Gradients, f64)> {
    if batch_x.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    if batch_x.len() != batch_y.len() {
        return Err(Error::LengthMismatch {
            left: batch_x.len(),
            right: batch_y.len(),
        });
    }
    let inputs = params.layers[0].cols;
    if let Some(bad) = batch_x.iter().find(|x| x.as_ref().len() != inputs) {
        return Err(Error::invalid(format!(
            "input has {} values, network expects {inputs}",
            bad.as_ref().len()
        )));
    }
    let mut grads = Gradients::zeros_like(params);
    let mut scratch = Scratch::new(params);
    let loss = backward_into(params, batch_x, batch_y, &mut grads, &mut scratch);
    Ok((grads, loss))
}

/// Second-hidden-layer activations for every row of `xs`.
pub fn extract_features<X: AsRef<[f64]>>(params: &MlpParams, xs: &[X]) -> FeatureMatrix {
    let cols = params.layers[1].rows;
    let mut data = Vec::with_capacity(xs.len() * cols);
    for x in xs {
        data.extend(params.forward(x.as_ref()).a2);
    }
    FeatureMatrix::from_raw(xs.len(), cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_shapes_and_zero_bias() {
        let p = MlpParams::init(42);
        assert_eq!(p.w1().shape(), (32, 4));
        assert_eq!(p.w2().shape(), (16, 32));
        assert_eq!(p.w3().shape(), (1, 16));
        assert!(p.layers.iter().all(|l| l.bias.iter().all(|b| *b == 0.0)));
        assert_eq!(p, MlpParams::init(42));
        assert_ne!(p, MlpParams::init(43));
        p.validate().unwrap();
    }

    #[test]
    fn init_respects_he_bound() {
        let p = MlpParams::init(1);
        for l in &p.layers {
            let bound = (6.0 / l.cols as f64).sqrt();
            assert!(l.weights.iter().all(|w| w.abs() <= bound));
        }
    }

    #[test]
    fn zero_network() {
        let p = MlpParams::zeros(Architecture::default());
        let t = p.forward(&[1.0, -2.0, 3.0, 0.5]);
        assert!(t.a1.iter().chain(&t.a2).all(|v| *v == 0.0));
        assert_eq!(t.y_hat, 0.0);
    }

    #[test]
    fn constant_head() {
        let mut p = MlpParams::zeros(Architecture::default());
        p.layers[2].bias[0] = 2.5;
        for x in [[0.0; 4], [1.0, 2.0, 3.0, 4.0], [-9.0, 0.1, 7.0, -3.0]] {
            assert_eq!(p.predict(&x), 2.5);
        }
    }

    #[test]
    fn single_active_path() {
        let mut p = MlpParams::zeros(Architecture::default());
        let (w1, w2, w3) = (0.5, 3.0, -1.25);
        *p.layers[0].weight_mut(0, 2) = w1;
        *p.layers[1].weight_mut(0, 0) = w2;
        *p.layers[2].weight_mut(0, 0) = w3;
        let x = [0.0, 0.0, 4.0, 0.0];
        let t = p.forward(&x);
        assert_eq!(t.a1[0], 2.0);
        assert_eq!(t.a2[0], 6.0);
        assert_eq!(t.y_hat, w3 * w2 * w1 * 4.0);
    }

    #[test]
    fn zero_residual_zero_gradient() {
        let p = MlpParams::init(3);
        let xs = [[0.1, 0.2, -0.3, 0.4], [1.0, -1.0, 0.5, 0.0]];
        let ys: Vec<f64> = xs.iter().map(|x| p.predict(x)).collect();
        let (g, loss) = backward(&p, &xs, &ys).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.values().all(|v| *v == 0.0));
    }

    #[test]
    fn output_bias_gradient_is_linear_in_residual() {
        let p = MlpParams::init(11);
        let xs = [[0.3, -0.2, 0.9, 1.1], [-0.5, 0.4, 0.0, 0.2], [1.2, 1.0, -0.7, 0.3]];
        let preds: Vec<f64> = xs.iter().map(|x| p.predict(x)).collect();
        let ys: Vec<f64> = preds.iter().enumerate().map(|(i, p)| p - 0.3 * (i as f64 + 1.0)).collect();
        // doubled residual: y' = y_hat - 2 (y_hat - y)
        let ys2: Vec<f64> = preds.iter().zip(&ys).map(|(p, y)| p - 2.0 * (p - y)).collect();
        let (g1, _) = backward(&p, &xs, &ys).unwrap();
        let (g2, _) = backward(&p, &xs, &ys2).unwrap();
        let b1 = g1.params().layers[2].bias[0];
        let b2 = g2.params().layers[2].bias[0];
        assert!((b2 - 2.0 * b1).abs() <= 1e-12 * b1.abs().max(1.0));
    }

    #[test]
    fn backward_rejects_bad_batches() {
        let p = MlpParams::init(0);
        let empty: [[f64; 4]; 0] = [];
        assert!(backward(&p, &empty, &[]).is_err());
        assert!(backward(&p, &[[0.0; 4]], &[1.0, 2.0]).is_err());
        assert!(backward(&p, &[[0.0; 3]], &[1.0]).is_err());
    }

    #[test]
    fn features_match_forward() {
        let p = MlpParams::init(5);
        let xs = [[0.1, 0.2, 0.3, 0.4], [-1.0, 2.0, -0.5, 1.5], [3.0, 0.0, 0.0, -2.0]];
        let f = extract_features(&p, &xs);
        assert_eq!((f.rows(), f.cols()), (3, 16));
        for (i, x) in xs.iter().enumerate() {
            assert_eq!(f.row(i), p.forward(x).a2.as_slice());
        }
        let z = extract_features(&MlpParams::zeros(Architecture::default()), &xs);
        assert!(z.as_slice().iter().all(|v| *v == 0.0));
    }
}
