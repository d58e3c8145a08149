//! End-to-end runs: the plain network against network features + tree.
//!
//! A run loads the dataset, augments and splits it (in either order), fits a
//! z-score scaler on the training rows only, trains the network, and then
//! evaluates either the network head (`simple_ann`) or a regression tree fit
//! on the second hidden layer's activations (`neurosymbolic`). [`compare`]
//! does both on one split and, by default, one shared network.

mod artifacts;
pub mod cli;
mod config;

use std::path::PathBuf;

use sha2::{Digest, Sha256};

pub use artifacts::{export_plot_data, write_comparison, write_manifest, Manifest};
pub use config::{ExperimentConfig, ModelKind, SplitConfig};

use crate::augment::{augment_tabular, AugmentConfig};
use crate::data::{self, Dataset, Samples, ScalerStats, TrainValSplit};
use crate::error::{Error, Result};
use crate::metrics::ModelReport;
use crate::mlp::{self, LossHistory, MlpParams, TrainConfig};
use crate::rng;
use crate::symtree::{self, RegressionTree};

/// Which predictor a report belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SimpleAnn,
    Neurosymbolic,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SimpleAnn => "simple_ann",
            Algorithm::Neurosymbolic => "neurosymbolic",
        }
    }
}

/// Data after loading, augmentation, splitting and scaling.
#[derive(Debug, Clone)]
pub struct PreparedData {
    /// Full (possibly augmented) dataset in physical units.
    pub dataset: Dataset,
    pub split: TrainValSplit,
    /// Fit on training rows only.
    pub scaler: ScalerStats,
    pub train: Samples,
    pub val: Samples,
    /// SHA-256 of the raw dataset bytes.
    pub dataset_hash: String,
    pub source_rows: usize,
}

/// A trained network with its training record.
#[derive(Debug, Clone)]
pub struct TrainedNetwork {
    pub params: MlpParams,
    pub history: LossHistory,
    pub config: TrainConfig,
}

/// Everything one model produced.
#[derive(Debug, Clone)]
pub struct ModelRun {
    pub algorithm: Algorithm,
    pub report: ModelReport,
    pub network: TrainedNetwork,
    pub tree: Option<RegressionTree>,
    pub train_pred: Vec<f64>,
    pub val_pred: Vec<f64>,
}

/// One report per algorithm, all on the same split.
#[derive(Debug, Clone)]
pub struct ComparisonTable {
    pub rows: Vec<(Algorithm, ModelReport)>,
    pub train_indices: Vec<usize>,
    pub val_indices: Vec<usize>,
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", ModelReport::CSV_HEADER);
        for (algo, report) in &self.rows {
            out.push_str(&report.csv_row(algo.name()));
            out.push('\n');
        }
        out
    }

    pub fn report(&self, algo: Algorithm) -> Option<&ModelReport> {
        self.rows.iter().find(|(a, _)| *a == algo).map(|(_, r)| r)
    }

    /// Per metric, the better algorithm (lower MSE, higher R²) or `"tie"`.
    pub fn winners(&self) -> Vec<(&'static str, &'static str)> {
        type Get = fn(&ModelReport) -> f64;
        let metrics: [(&str, Get, bool); 4] = [
            ("mse_train", |r| r.mse_train, false),
            ("mse_val", |r| r.mse_val, false),
            ("r2_train", |r| r.r2_train, true),
            ("r2_val", |r| r.r2_val, true),
        ];
        metrics
            .iter()
            .map(|&(name, get, higher_better)| {
                let mut best: Option<(Algorithm, f64)> = None;
                let mut tie = false;
                for (algo, r) in &self.rows {
                    let v = get(r);
                    match best {
                        None => best = Some((*algo, v)),
                        Some((_, b)) if v == b => tie = true,
                        Some((_, b)) if (v > b) == higher_better => {
                            best = Some((*algo, v));
                            tie = false;
                        }
                        _ => {}
                    }
                }
                let winner = match best {
                    Some((a, _)) if !tie => a.name(),
                    _ => "tie",
                };
                (name, winner)
            })
            .collect()
    }
}

/// Output of [`compare`].
#[derive(Debug, Clone)]
pub struct Comparison {
    pub table: ComparisonTable,
    pub runs: Vec<ModelRun>,
    pub data: PreparedData,
}

fn load_raw(config: &ExperimentConfig) -> Result<Vec<u8>> {
    match &config.data_path {
        Some(p) => std::fs::read(p).map_err(|e| Error::io(p, e)),
        None => Ok(data::TABLE1_CSV.as_bytes().to_vec()),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Load, augment, split and scale according to `config`.
pub fn prepare_data(config: &ExperimentConfig) -> Result<PreparedData> {
    config.validate()?;
    let raw = load_raw(config)?;
    let text = std::str::from_utf8(&raw).map_err(|e| Error::invalid(format!("dataset is not UTF-8: {e}")))?;
    let source = data::parse_dataset(text)?;
    let fraction = config.split.train_fraction;

    let (dataset, split) = if config.split.split_first {
        let s = data::split(source.len(), fraction, config.split.seed)?;
        let train_src = source.select(&s.train_indices)?;
        let val_src = source.select(&s.val_indices)?;
        let train_target = ((config.augment.target_size as f64 * fraction).round() as usize)
            .max(train_src.len());
        let val_target = config
            .augment
            .target_size
            .saturating_sub(train_target)
            .max(val_src.len());
        let train_aug = augment_tabular(
            &train_src,
            &AugmentConfig {
                target_size: train_target,
                seed: rng::substream(config.augment.seed, "augment-train"),
                ..config.augment.clone()
            },
        )?;
        let val_aug = augment_tabular(
            &val_src,
            &AugmentConfig {
                target_size: val_target,
                seed: rng::substream(config.augment.seed, "augment-val"),
                ..config.augment.clone()
            },
        )?;
        let n_train = train_aug.len();
        let mut records = train_aug.records().to_vec();
        records.extend_from_slice(val_aug.records());
        let n = records.len();
        let combined = Dataset::new(records)?;
        let split = TrainValSplit {
            train_indices: (0..n_train).collect(),
            val_indices: (n_train..n).collect(),
            seed: config.split.seed,
        };
        (combined, split)
    } else {
        let augmented = augment_tabular(&source, &config.augment)?;
        let split = data::split(augmented.len(), fraction, config.split.seed)?;
        (augmented, split)
    };

    let all = dataset.samples();
    let train_raw = all.select(&split.train_indices);
    let val_raw = all.select(&split.val_indices);
    let scaler = ScalerStats::fit(&train_raw.x)?;
    Ok(PreparedData {
        train: scaler.transform_samples(&train_raw),
        val: scaler.transform_samples(&val_raw),
        dataset,
        split,
        scaler,
        dataset_hash: sha256_hex(&raw),
        source_rows: source.len(),
    })
}

pub fn train_network(data: &PreparedData, config: &TrainConfig) -> Result<TrainedNetwork> {
    let (params, history) = mlp::train(&data.train, Some(&data.val), config)?;
    Ok(TrainedNetwork {
        params,
        history,
        config: config.clone(),
    })
}

/// Evaluate a trained network through its own output head.
pub fn evaluate_simple_ann(data: &PreparedData, network: TrainedNetwork) -> Result<ModelRun> {
    let train_pred = network.params.predict_all(&data.train.x);
    let val_pred = network.params.predict_all(&data.val.x);
    let report = ModelReport::evaluate(&data.train.y, &train_pred, &data.val.y, &val_pred)?;
    Ok(ModelRun {
        algorithm: Algorithm::SimpleAnn,
        report,
        network,
        tree: None,
        train_pred,
        val_pred,
    })
}

/// Fit a tree on the network's learned features and evaluate it.
pub fn evaluate_neurosymbolic(
    data: &PreparedData,
    network: TrainedNetwork,
    tree_config: &symtree::TreeConfig,
) -> Result<ModelRun> {
    let train_features = mlp::extract_features(&network.params, &data.train.x);
    let val_features = mlp::extract_features(&network.params, &data.val.x);
    let tree = symtree::fit_tree(&train_features, &data.train.y, tree_config)?;
    let train_pred = tree.predict_matrix(&train_features);
    let val_pred = tree.predict_matrix(&val_features);
    let report = ModelReport::evaluate(&data.train.y, &train_pred, &data.val.y, &val_pred)?;
    Ok(ModelRun {
        algorithm: Algorithm::Neurosymbolic,
        report,
        network,
        tree: Some(tree),
        train_pred,
        val_pred,
    })
}

pub fn run_simple_ann(config: &ExperimentConfig) -> Result<(PreparedData, ModelRun)> {
    let data = prepare_data(config)?;
    let network = train_network(&data, &config.train)?;
    let run = evaluate_simple_ann(&data, network)?;
    Ok((data, run))
}

pub fn run_neurosymbolic(config: &ExperimentConfig) -> Result<(PreparedData, ModelRun)> {
    let data = prepare_data(config)?;
    let network = train_network(&data, &config.train)?;
    let run = evaluate_neurosymbolic(&data, network, &config.tree)?;
    Ok((data, run))
}

/// Both models on one split. With `shared_network` the tree reads features
/// from the very network whose head is the baseline; otherwise the
/// neurosymbolic model trains its own network from a derived seed.
pub fn compare(config: &ExperimentConfig) -> Result<Comparison> {
    let data = prepare_data(config)?;
    let network = train_network(&data, &config.train)?;
    let tree_network = if config.shared_network {
        network.clone()
    } else {
        let cfg = TrainConfig {
            seed: rng::substream(config.train.seed, "neurosymbolic"),
            ..config.train.clone()
        };
        train_network(&data, &cfg)?
    };
    let ann = evaluate_simple_ann(&data, network)?;
    let nsai = evaluate_neurosymbolic(&data, tree_network, &config.tree)?;
    let table = ComparisonTable {
        rows: vec![(ann.algorithm, ann.report), (nsai.algorithm, nsai.report)],
        train_indices: data.split.train_indices.clone(),
        val_indices: data.split.val_indices.clone(),
    };
    Ok(Comparison {
        table,
        runs: vec![ann, nsai],
        data,
    })
}

/// Resolve where artifacts go: explicit flag, then `NSAI_OUT_DIR`, then the config.
pub fn resolve_output_dir(flag: Option<PathBuf>, config: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| config.output_dir.clone())
}

/// Environment variable overriding the configured output directory.
pub const OUT_DIR_ENV: &str = "NSAI_OUT_DIR";
