//! The symbolic half: a greedy CART regression tree over learned features.
//!
//! Splits minimize the summed squared error of the two children. Candidate
//! thresholds sit at midpoints between consecutive distinct feature values,
//! samples with `value <= threshold` go left, and among equally good splits
//! the lowest feature index and then the lowest threshold wins. A node becomes
//! a leaf at `max_depth`, when its targets are all equal, when it has fewer
//! than `min_samples_split` samples, or when no split leaves
//! `min_samples_leaf` samples on both sides. Leaves predict the mean of the
//! training targets that reach them.

mod persist;
mod rules;

use serde::{Deserialize, Serialize};

pub use persist::{tree_from_text, tree_to_text};
pub use rules::{export_rules, parse_rules};

use crate::error::{Error, Result};

/// Row-major `rows × cols` matrix of nonnegative features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    /// Checks the buffer length and that every entry is finite and `>= 0`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(format!("feature value {v} is not finite and >= 0")));
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        FeatureMatrix { rows, cols, data }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(r) = rows.iter().find(|r| r.as_ref().len() != cols) {
            return Err(Error::LengthMismatch {
                left: r.as_ref().len(),
                right: cols,
            });
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Rows picked by `indices`.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix::from_raw(indices.len(), self.cols, data)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 4,
            min_samples_leaf: 1,
            min_samples_split: 2,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_leaf == 0 {
            return Err(Error::invalid("min_samples_leaf must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
        count: usize,
    },
}

/// A binary regression tree stored as a pre-order node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
    n_features: usize,
}

impl RegressionTree {
    /// Assemble from a pre-order node list, checking child links and feature indices.
    pub fn from_nodes(nodes: Vec<Node>, n_features: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("tree has no nodes"));
        }
        for (i, n) in nodes.iter().enumerate() {
            if let Node::Split {
                feature,
                threshold,
                left,
                right,
            } = *n
            {
                if feature >= n_features || !threshold.is_finite() {
                    return Err(Error::invalid(format!("node {i}: bad split")));
                }
                if left != i + 1 || right <= left || right >= nodes.len() {
                    return Err(Error::invalid(format!("node {i}: children out of pre-order")));
                }
            }
        }
        Ok(RegressionTree { nodes, n_features })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        fn go(t: &RegressionTree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }

    /// Index of the leaf `row` lands in.
    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(row)] {
            Node::Leaf { value, .. } => value,
            Node::Split { .. } => unreachable!("leaf_index returns leaves"),
        }
    }

    pub fn predict_matrix(&self, features: &FeatureMatrix) -> Vec<f64> {
        (0..features.rows())
            .map(|i| self.predict(features.row(i)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    sse: f64,
}

struct Builder<'a> {
    x: &'a FeatureMatrix,
    y: &'a [f64],
    config: TreeConfig,
    nodes: Vec<Node>,
    // scratch: (value, centered target) pairs
    pairs: Vec<(f64, f64)>,
}

/// Relative tolerance under which two split scores count as tied.
const TIE_TOLERANCE: f64 = 1e-10;

impl Builder<'_> {
    fn mean(&self, idx: &[usize]) -> f64 {
        idx.iter().map(|&i| self.y[i]).sum::<f64>() / idx.len() as f64
    }

    fn best_split(&mut self, idx: &[usize], mean: f64) -> Option<Candidate> {
        let n = idx.len();
        let min_leaf = self.config.min_samples_leaf;
        let node_sse: f64 = idx.iter().map(|&i| (self.y[i] - mean).powi(2)).sum();
        let tol = TIE_TOLERANCE * (1.0 + node_sse);
        let mut best: Option<Candidate> = None;

        for f in 0..self.x.cols() {
            self.pairs.clear();
            self.pairs
                .extend(idx.iter().map(|&i| (self.x.get(i, f), self.y[i] - mean)));
            self.pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

            let total_sum: f64 = self.pairs.iter().map(|p| p.1).sum();
            let total_sq: f64 = self.pairs.iter().map(|p| p.1 * p.1).sum();
            let (mut sum_l, mut sq_l) = (0.0, 0.0);
            for k in 1..n {
                let (v_prev, t_prev) = self.pairs[k - 1];
                sum_l += t_prev;
                sq_l += t_prev * t_prev;
                let v = self.pairs[k].0;
                if v_prev >= v || k < min_leaf || n - k < min_leaf {
                    continue;
                }
                let (nl, nr) = (k as f64, (n - k) as f64);
                let sum_r = total_sum - sum_l;
                let sq_r = total_sq - sq_l;
                let sse = (sq_l - sum_l * sum_l / nl) + (sq_r - sum_r * sum_r / nr);
                if best.is_none_or(|b| sse < b.sse - tol) {
                    let mut threshold = 0.5 * (v_prev + v);
                    if threshold >= v {
                        threshold = v_prev;
                    }
                    best = Some(Candidate {
                        feature: f,
                        threshold,
                        sse,
                    });
                }
            }
        }
        best
    }

    fn build(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        let pure = idx.iter().all(|&i| self.y[i] == self.y[idx[0]]);
        // summing n copies of c need not give back c exactly
        let mean = if pure { self.y[idx[0]] } else { self.mean(idx) };
        let leaf = Node::Leaf {
            value: mean,
            count: idx.len(),
        };
        if depth >= self.config.max_depth || idx.len() < self.config.min_samples_split || pure {
            self.nodes.push(leaf);
            return id;
        }
        let Some(best) = self.best_split(idx, mean) else {
            self.nodes.push(leaf);
            return id;
        };

        self.nodes.push(Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: id + 1,
            right: 0,
        });
        // stable partition keeps index order inside each child
        let (mut l, mut r): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.x.get(i, best.feature) <= best.threshold);
        self.build(&mut l, depth + 1);
        let right_id = self.build(&mut r, depth + 1);
        if let Node::Split { right, .. } = &mut self.nodes[id] {
            *right = right_id;
        }
        id
    }
}

/// Fit a regression tree on `features` against `targets`.
pub fn fit_tree(features: &FeatureMatrix, targets: &[f64], config: &TreeConfig) -> Result<RegressionTree> {
    config.validate()?;
    if features.rows() == 0 {
        return Err(Error::invalid("cannot fit a tree on zero samples"));
    }
    if features.rows() != targets.len() {
        return Err(Error::LengthMismatch {
            left: features.rows(),
            right: targets.len(),
        });
    }
    if let Some(t) = targets.iter().find(|t| !t.is_finite()) {
        return Err(Error::invalid(format!("non-finite target {t}")));
    }
    let mut builder = Builder {
        x: features,
        y: targets,
        config: *config,
        nodes: Vec::new(),
        pairs: Vec::with_capacity(targets.len()),
    };
    let mut idx: Vec<usize> = (0..targets.len()).collect();
    builder.build(&mut idx, 0);
    RegressionTree::from_nodes(builder.nodes, features.cols())
}
