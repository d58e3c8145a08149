//! Synthetic expansion of small tabular datasets by jittered resampling.
//!
//! Each synthetic row is a uniformly drawn source row with independent
//! zero-mean Gaussian noise added to every column, target included. The noise
//! standard deviation for a column is `noise_scale` times that column's sample
//! standard deviation in the source. Whole rows are resampled, so cross-column
//! structure of the source survives up to the added noise.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ExperimentRecord, N_FEATURES};
use crate::error::{Error, Result};
use crate::rng;

const N_COLS: usize = N_FEATURES + 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    /// Total output rows, originals included.
    pub target_size: usize,
    /// Noise std as a multiple of each source column's std.
    pub noise_scale: f64,
    pub seed: u64,
    /// Clamp each synthetic value into the source column's observed range.
    pub clamp: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            target_size: 1000,
            noise_scale: 0.05,
            seed: 0,
            clamp: true,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.noise_scale.is_finite() || self.noise_scale < 0.0 {
            return Err(Error::invalid(format!(
                "noise_scale must be finite and >= 0, got {}",
                self.noise_scale
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct ColumnStats {
    std: f64,
    min: f64,
    max: f64,
}

fn column_stats(rows: &[[f64; N_COLS]]) -> [ColumnStats; N_COLS] {
    let n = rows.len() as f64;
    std::array::from_fn(|c| {
        let mean = rows.iter().map(|r| r[c]).sum::<f64>() / n;
        let std = if rows.len() > 1 {
            (rows.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let min = rows.iter().map(|r| r[c]).fold(f64::INFINITY, f64::min);
        let max = rows.iter().map(|r| r[c]).fold(f64::NEG_INFINITY, f64::max);
        ColumnStats { std, min, max }
    })
}

/// Expand `dataset` to `config.target_size` rows. The originals come first,
/// verbatim and in order.
pub fn augment_tabular(dataset: &Dataset, config: &AugmentConfig) -> Result<Dataset> {
    config.validate()?;
    let n = dataset.len();
    if config.target_size < n {
        return Err(Error::invalid(format!(
            "target_size {} is smaller than the source ({n} rows)",
            config.target_size
        )));
    }

    let source: Vec<[f64; N_COLS]> = dataset.records().iter().map(|r| r.values()).collect();
    let stats = column_stats(&source);
    let mut rng = rng::seeded(config.seed);

    let mut records = dataset.records().to_vec();
    records.reserve(config.target_size - n);
    for _ in n..config.target_size {
        let base = &source[rng.random_range(0..n)];
        let row: [f64; N_COLS] = std::array::from_fn(|c| {
            let z: f64 = rng.sample(StandardNormal);
            let v = base[c] + config.noise_scale * stats[c].std * z;
            if config.clamp {
                v.clamp(stats[c].min, stats[c].max)
            } else {
                v
            }
        });
        records.push(ExperimentRecord::from_values(row));
    }
    Dataset::new(records)
}

/// Points of the sine-curve augmentation demo.
#[derive(Debug, Clone, PartialEq)]
pub struct SineDemo {
    pub original: Vec<(f64, f64)>,
    pub synthetic: Vec<(f64, f64)>,
}

/// Noisy samples of `sin` on an even grid over [0, 2π], then synthetic points
/// made by resampling those originals and adding fresh noise to `y`.
pub fn sine_demo(n_original: usize, n_synthetic: usize, noise_sd: f64, seed: u64) -> Result<SineDemo> {
    if n_original == 0 || n_synthetic == 0 {
        return Err(Error::invalid("sine demo counts must be >= 1"));
    }
    if !noise_sd.is_finite() || noise_sd < 0.0 {
        return Err(Error::invalid(format!("noise_sd must be >= 0, got {noise_sd}")));
    }
    let mut rng = rng::seeded(seed);
    let step = if n_original > 1 {
        TAU / (n_original - 1) as f64
    } else {
        0.0
    };
    let original: Vec<(f64, f64)> = (0..n_original)
        .map(|i| {
            let x = step * i as f64;
            let eps: f64 = rng.sample(StandardNormal);
            (x, x.sin() + noise_sd * eps)
        })
        .collect();
    let synthetic = (0..n_synthetic)
        .map(|_| {
            let (x, y) = original[rng.random_range(0..n_original)];
            let eps: f64 = rng.sample(StandardNormal);
            (x, y + noise_sd * eps)
        })
        .collect();
    Ok(SineDemo { original, synthetic })
}

/// `x,y` CSV for a point list.
pub fn xy_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in points {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}
