//! Files written by a run.
//!
//! | file                         | contents                                  |
//! |------------------------------|-------------------------------------------|
//! | `comparison.csv`             | `algorithm,mse_train,mse_val,r2_train,r2_val` |
//! | `loss_history[_<algo>].csv`  | `epoch,train_loss,val_loss`               |
//! | `pred_{train,val}_<algo>.csv`| `true,predicted`, one row per sample      |
//! | `model[_<algo>].bin`         | network weights, see [`crate::mlp::save_model`] |
//! | `scaler.json`                | feature means and stds from the training rows |
//! | `tree.txt` / `rules.txt`     | exact tree and readable rules             |
//! | `manifest.json`              | config, seeds, dataset hash, version, file list |
//!
//! The `_<algo>` suffix appears only when the two models trained separate networks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ComparisonTable, ExperimentConfig, ModelRun, PreparedData};
use crate::error::{Error, Result};
use crate::mlp::save_model;
use crate::symtree::{export_rules, tree_to_text};

pub(crate) fn write_file(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn pred_csv(truth: &[f64], pred: &[f64]) -> String {
    let mut out = String::from("true,predicted\n");
    for (t, p) in truth.iter().zip(pred) {
        let _ = writeln!(out, "{t},{p}");
    }
    out
}

/// Write the per-model artifacts of `run` into `dir`. `network_suffix`, when
/// set, is appended to the network files (`model`, `loss_history`).
pub fn export_plot_data(
    run: &ModelRun,
    data: &PreparedData,
    dir: &Path,
    network_suffix: Option<&str>,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let algo = run.algorithm.name();
    let suffix = network_suffix.map(|s| format!("_{s}")).unwrap_or_default();
    let mut files = vec![
        write_file(
            dir,
            &format!("loss_history{suffix}.csv"),
            run.network.history.to_csv(),
        )?,
        write_file(
            dir,
            &format!("model{suffix}.bin"),
            save_model(&run.network.params, &run.network.config),
        )?,
        write_file(
            dir,
            "scaler.json",
            serde_json::to_string_pretty(&data.scaler)?,
        )?,
        write_file(
            dir,
            &format!("pred_train_{algo}.csv"),
            pred_csv(&data.train.y, &run.train_pred),
        )?,
        write_file(
            dir,
            &format!("pred_val_{algo}.csv"),
            pred_csv(&data.val.y, &run.val_pred),
        )?,
    ];
    if let Some(tree) = &run.tree {
        files.push(write_file(dir, "tree.txt", tree_to_text(tree))?);
        files.push(write_file(dir, "rules.txt", export_rules(tree))?);
    }
    Ok(files)
}

pub fn write_comparison(table: &ComparisonTable, dir: &Path) -> Result<PathBuf> {
    ensure_dir(dir)?;
    write_file(dir, "comparison.csv", table.to_csv())
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub software: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: ExperimentConfig,
    pub seeds: Seeds,
    pub dataset_sha256: String,
    pub source_rows: usize,
    pub dataset_rows: usize,
    pub train_rows: usize,
    pub val_rows: usize,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Seeds {
    pub augment: u64,
    pub split: u64,
    pub train: u64,
}

impl Manifest {
    pub fn new(command: &str, config: &ExperimentConfig, data: &PreparedData, files: &[PathBuf]) -> Self {
        Manifest {
            software: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: config.clone(),
            seeds: Seeds {
                augment: config.augment.seed,
                split: config.split.seed,
                train: config.train.seed,
            },
            dataset_sha256: data.dataset_hash.clone(),
            source_rows: data.source_rows,
            dataset_rows: data.dataset.len(),
            train_rows: data.train.len(),
            val_rows: data.val.len(),
            files: files
                .iter()
                .filter_map(|p| p.file_name())
                .map(|n| n.to_string_lossy().into_owned())
                .collect(),
        }
    }
}

pub fn write_manifest(manifest: &Manifest, dir: &Path) -> Result<PathBuf> {
    ensure_dir(dir)?;
    write_file(dir, "manifest.json", serde_json::to_string_pretty(manifest)?)
}
