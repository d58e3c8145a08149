use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augment::AugmentConfig;
use crate::error::{Error, Result};
use crate::mlp::TrainConfig;
use crate::symtree::TreeConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelKind {
    SimpleAnn,
    Neurosymbolic,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub train_fraction: f64,
    /// Split the source rows before augmenting, so no synthetic child of a
    /// validation row is trained on.
    pub split_first: bool,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            train_fraction: 0.8,
            split_first: false,
            seed: 0,
        }
    }
}

/// Everything one run needs. Loaded from JSON with sections mirroring the
/// nested config types; missing fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Dataset CSV. `None` uses the bundled experimental table. Relative
    /// paths in a config file are resolved against the file's directory.
    pub data_path: Option<PathBuf>,
    pub augment: AugmentConfig,
    pub split: SplitConfig,
    pub train: TrainConfig,
    pub tree: TreeConfig,
    pub output_dir: PathBuf,
    pub model_kind: ModelKind,
    /// In `both` mode, evaluate one trained network through its own head and
    /// through the tree. When false, each model trains its own network.
    pub shared_network: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data_path: None,
            augment: AugmentConfig::default(),
            split: SplitConfig::default(),
            train: TrainConfig::default(),
            tree: TreeConfig::default(),
            output_dir: PathBuf::from("nsai-out"),
            model_kind: ModelKind::Both,
            shared_network: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a JSON config, resolve `data_path` relative to it, and check that
    /// the data file exists.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(data) = cfg.data_path.as_mut() {
            if data.is_relative() {
                if let Some(dir) = path.parent() {
                    *data = dir.join(&*data);
                }
            }
        }
        cfg.check_paths()?;
        Ok(cfg)
    }

    pub fn check_paths(&self) -> Result<()> {
        if let Some(p) = &self.data_path {
            if !p.is_file() {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "data file not found"),
                ));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.augment.validate()?;
        self.train.validate()?;
        self.tree.validate()?;
        let f = self.split.train_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Config(format!("train_fraction {f} not in (0, 1)")));
        }
        Ok(())
    }

    /// Use `seed` for augmentation, splitting and training alike.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.augment.seed = seed;
        self.split.seed = seed;
        self.train.seed = seed;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
