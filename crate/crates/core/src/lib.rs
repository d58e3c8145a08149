//! Neurosymbolic regression for additive-manufacturing process data.
//!
//! The pipeline has two halves. A small fully connected network (4 → 32 → 16 → 1,
//! ReLU hidden layers, linear head) is trained with Adam on mean squared error.
//! Its second hidden layer is then read out as a 16-dimensional learned feature
//! vector, and a depth-limited CART regression tree is fit on those features
//! against the raw targets. The tree is the interpretable predictor; the
//! network's own head is the "simple ANN" baseline it is compared against.
//!
//! Modules, bottom-up:
//!
//! - [`data`]: CSV ingestion of process-parameter records, z-scoring, seeded splits.
//! - [`augment`]: jittered bootstrap expansion of a small dataset, plus the sine toy.
//! - [`mlp`]: parameters, forward/backward passes, Adam, the training loop,
//!   feature extraction and a binary model file.
//! - [`symtree`]: greedy CART regression tree, prediction, rule export and a
//!   text persistence format.
//! - [`metrics`]: MSE and R².
//! - [`experiment`]: config-driven runs, comparison tables, CSV artifacts and the CLI.
//!
//! All randomness flows from explicit `u64` seeds through ChaCha8 (see [`rng`]),
//! so every run is a pure function of its inputs.
//!
//! ```
//! use nsai::{data, mlp, symtree, metrics};
//!
//! let ds = data::parse_dataset(data::TABLE1_CSV).unwrap();
//! assert_eq!(ds.len(), 31);
//!
//! let (samples, _stats) = data::standardize(&ds.samples()).unwrap();
//! let params = mlp::MlpParams::init(7);
//! let features = mlp::extract_features(&params, &samples.x);
//! assert_eq!(features.cols(), 16);
//!
//! let tree = symtree::fit_tree(&features, &samples.y, &symtree::TreeConfig::default()).unwrap();
//! let preds = tree.predict_matrix(&features);
//! assert!(metrics::mse(&samples.y, &preds).unwrap() >= 0.0);
//! ```

pub mod augment;
pub mod data;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod mlp;
pub mod rng;
pub mod symtree;

pub use error::{Error, Result};
