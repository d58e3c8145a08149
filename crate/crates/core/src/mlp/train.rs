use std::fmt::Write as _;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{backward_into, AdamState, Architecture, Gradients, MlpParams, Scratch};
use crate::data::Samples;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub hidden_units: [usize; 2],
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 2000,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 0,
            hidden_units: [32, 16],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::invalid("epochs and batch_size must be >= 1"));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::invalid(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.hidden_units.contains(&0) {
            return Err(Error::invalid("hidden_units must be >= 1"));
        }
        Ok(())
    }

    pub fn architecture(&self, inputs: usize) -> Architecture {
        Architecture {
            inputs,
            hidden: self.hidden_units,
        }
    }
}

/// Per-epoch mean losses. `val` is absent when training ran without a
/// validation set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossHistory {
    pub train: Vec<f64>,
    pub val: Option<Vec<f64>>,
}

impl LossHistory {
    pub fn epochs(&self) -> usize {
        self.train.len()
    }

    /// `epoch,train_loss,val_loss` with 1-based epochs. The last field is
    /// empty when there is no validation set.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss\n");
        for (i, t) in self.train.iter().enumerate() {
            let _ = match &self.val {
                Some(v) => writeln!(out, "{},{},{}", i + 1, t, v[i]),
                None => writeln!(out, "{},{},", i + 1, t),
            };
        }
        out
    }
}

fn batch_mse(params: &MlpParams, s: &Samples) -> f64 {
    s.x.iter()
        .zip(&s.y)
        .map(|(x, y)| (params.predict(x) - y).powi(2))
        .sum::<f64>()
        / s.len() as f64
}

/// Mini-batch Adam on squared error.
///
/// Initial weights come from the `"init"` substream of `config.seed`; each
/// epoch reshuffles the training order from the `"shuffle"` substream. The
/// final short batch is kept. The recorded train loss is the batch-size
/// weighted mean of batch losses; validation loss is evaluated on the whole
/// validation set after each epoch.
pub fn train(
    train_set: &Samples,
    val_set: Option<&Samples>,
    config: &TrainConfig,
) -> Result<(MlpParams, LossHistory)> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    if train_set.x.len() != train_set.y.len() {
        return Err(Error::LengthMismatch {
            left: train_set.x.len(),
            right: train_set.y.len(),
        });
    }
    let val_set = val_set.filter(|v| !v.is_empty());

    let arch = config.architecture(crate::data::N_FEATURES);
    let mut params = MlpParams::init_with(arch, rng::substream(config.seed, "init"));
    let mut adam = AdamState::new(&params, config.learning_rate);
    let mut shuffle_rng = rng::seeded(rng::substream(config.seed, "shuffle"));

    let mut grads = Gradients::zeros_like(&params);
    let mut scratch = Scratch::new(&params);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut bx = Vec::with_capacity(config.batch_size);
    let mut by = Vec::with_capacity(config.batch_size);

    let mut history = LossHistory {
        train: Vec::with_capacity(config.epochs),
        val: val_set.map(|_| Vec::with_capacity(config.epochs)),
    };

    for _ in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut weighted = 0.0;
        for chunk in order.chunks(config.batch_size) {
            bx.clear();
            by.clear();
            bx.extend(chunk.iter().map(|&i| train_set.x[i]));
            by.extend(chunk.iter().map(|&i| train_set.y[i]));
            let loss = backward_into(&params, &bx, &by, &mut grads, &mut scratch);
            adam.step(&mut params, &grads);
            weighted += loss * chunk.len() as f64;
        }
        history.train.push(weighted / train_set.len() as f64);
        if let (Some(v), Some(hist)) = (val_set, history.val.as_mut()) {
            hist.push(batch_mse(&params, v));
        }
    }
    Ok((params, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_set(n: usize) -> Samples {
        let mut r = rng::seeded(17);
        use rand::Rng;
        let x: Vec<[f64; 4]> = (0..n)
            .map(|_| std::array::from_fn(|_| r.random_range(-1.0..1.0)))
            .collect();
        let y = x.iter().map(|v| v.iter().sum()).collect();
        Samples { x, y }
    }

    #[test]
    fn learns_linear_target() {
        let s = linear_set(50);
        let cfg = TrainConfig {
            epochs: 200,
            batch_size: 8,
            learning_rate: 1e-2,
            seed: 1,
            ..Default::default()
        };
        let (p, hist) = train(&s, None, &cfg).unwrap();
        assert_eq!(hist.epochs(), 200);
        let final_mse = batch_mse(&p, &s);
        assert!(final_mse < 1e-2, "final mse {final_mse}");
        assert!(hist.train.iter().all(|l| *l >= 0.0));
    }

    #[test]
    fn deterministic() {
        let s = linear_set(40);
        let cfg = TrainConfig {
            epochs: 5,
            batch_size: 7,
            seed: 3,
            ..Default::default()
        };
        let (p1, h1) = train(&s, Some(&s), &cfg).unwrap();
        let (p2, h2) = train(&s, Some(&s), &cfg).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(h1.to_csv(), h2.to_csv());
        assert_eq!(h1.val.as_ref().unwrap().len(), 5);
    }

    #[test]
    fn history_csv() {
        let h = LossHistory {
            train: vec![1.5, 0.5],
            val: None,
        };
        assert_eq!(h.to_csv(), "epoch,train_loss,val_loss\n1,1.5,\n2,0.5,\n");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(train(&Samples::default(), None, &TrainConfig::default()).is_err());
        let s = linear_set(4);
        let cfg = TrainConfig {
            epochs: 0,
            ..Default::default()
        };
        assert!(train(&s, None, &cfg).is_err());
    }
}
