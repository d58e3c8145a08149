//! Regression metrics.

use serde::Serialize;

use crate::error::{Error, Result};

fn check_lengths(y_true: &[f64], y_pred: &[f64], min: usize) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    if y_true.len() < min {
        return Err(Error::invalid(format!(
            "need at least {min} samples, got {}",
            y_true.len()
        )));
    }
    Ok(())
}

fn sse(y_true: &[f64], y_pred: &[f64]) -> f64 {
    y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| (t - p) * (t - p))
        .sum()
}

/// Mean squared error.
pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_lengths(y_true, y_pred, 1)?;
    Ok(sse(y_true, y_pred) / y_true.len() as f64)
}

/// Coefficient of determination, `1 - SS_res / SS_tot`, with the mean taken
/// over `y_true` itself. Constant `y_true` is an error rather than NaN.
pub fn r2(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_lengths(y_true, y_pred, 2)?;
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let ss_tot: f64 = y_true.iter().map(|t| (t - mean) * (t - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::ConstantTarget);
    }
    Ok(1.0 - sse(y_true, y_pred) / ss_tot)
}

/// Train/validation MSE and R² for one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelReport {
    pub mse_train: f64,
    pub mse_val: f64,
    pub r2_train: f64,
    pub r2_val: f64,
}

impl ModelReport {
    pub fn evaluate(
        train_true: &[f64],
        train_pred: &[f64],
        val_true: &[f64],
        val_pred: &[f64],
    ) -> Result<Self> {
        Ok(ModelReport {
            mse_train: mse(train_true, train_pred)?,
            mse_val: mse(val_true, val_pred)?,
            r2_train: r2(train_true, train_pred)?,
            r2_val: r2(val_true, val_pred)?,
        })
    }

    pub const CSV_HEADER: &'static str = "algorithm,mse_train,mse_val,r2_train,r2_val";

    /// One CSV row, `algorithm,mse_train,mse_val,r2_train,r2_val`, no newline.
    pub fn csv_row(&self, algorithm: &str) -> String {
        format!(
            "{algorithm},{},{},{},{}",
            self.mse_train, self.mse_val, self.r2_train, self.r2_val
        )
    }
}
