use super::{Gradients, MlpParams};

/// Adam optimizer state with bias-corrected moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: MlpParams,
    pub v: MlpParams,
    /// Completed steps.
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub learning_rate: f64,
}

impl AdamState {
    pub const BETA1: f64 = 0.9;
    pub const BETA2: f64 = 0.999;
    pub const EPSILON: f64 = 1e-8;

    /// Zeroed moments shaped like `params`, standard hyperparameters.
    pub fn new(params: &MlpParams, learning_rate: f64) -> Self {
        let zeros = MlpParams::zeros(params.architecture());
        AdamState {
            m: zeros.clone(),
            v: zeros,
            t: 0,
            beta1: Self::BETA1,
            beta2: Self::BETA2,
            epsilon: Self::EPSILON,
            learning_rate,
        }
    }

    /// One update in place:
    /// `m ← β1 m + (1-β1) g`, `v ← β2 v + (1-β2) g²`,
    /// `θ ← θ - lr · m̂ / (sqrt(v̂) + ε)` with `m̂ = m / (1-β1^t)`, `v̂ = v / (1-β2^t)`.
    pub fn step(&mut self, params: &mut MlpParams, grads: &Gradients) {
        debug_assert!(params.same_shape(grads.params()) && params.same_shape(&self.m));
        self.t += 1;
        let t = self.t as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, eps, lr) = (self.beta1, self.beta2, self.epsilon, self.learning_rate);
        for (((theta, g), m), v) in params
            .values_mut()
            .zip(grads.values())
            .zip(self.m.values_mut())
            .zip(self.v.values_mut())
        {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *theta -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}
