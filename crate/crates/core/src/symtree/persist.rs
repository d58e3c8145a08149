//! Exact text persistence for fitted trees.
//!
//! ```text
//! nsai-tree 1
//! features 16
//! split <feature> <threshold>
//! leaf <value> <count>
//! ...
//! ```
//!
//! Nodes are listed in pre-order; a split's left subtree follows it
//! immediately and its right subtree follows the left. Floats use Rust's
//! shortest round-trip formatting, so loading reproduces the tree bit for bit.

use std::fmt::Write as _;

use super::{Node, RegressionTree};
use crate::error::{Error, Result};

const HEADER: &str = "nsai-tree 1";

pub fn tree_to_text(tree: &RegressionTree) -> String {
    let mut out = format!("{HEADER}\nfeatures {}\n", tree.n_features());
    for node in tree.nodes() {
        let _ = match *node {
            Node::Split {
                feature, threshold, ..
            } => writeln!(out, "split {feature} {threshold:e}"),
            Node::Leaf { value, count } => writeln!(out, "leaf {value:e} {count}"),
        };
    }
    out
}

enum Item {
    Split(usize, f64),
    Leaf(f64, usize),
}

pub fn tree_from_text(text: &str) -> Result<RegressionTree> {
    let bad = |line: usize, msg: &str| Error::Format(format!("tree line {line}: {msg}"));
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    if lines.next() != Some(HEADER) {
        return Err(bad(1, "missing `nsai-tree 1` header"));
    }
    let n_features: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("features "))
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| bad(2, "expected `features <count>`"))?;

    let mut items = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let lineno = i + 3;
        let parts: Vec<&str> = line.split_whitespace().collect();
        let item = match parts.as_slice() {
            ["split", f, t] => Item::Split(
                f.parse().map_err(|_| bad(lineno, "bad feature"))?,
                t.parse().map_err(|_| bad(lineno, "bad threshold"))?,
            ),
            ["leaf", v, c] => Item::Leaf(
                v.parse().map_err(|_| bad(lineno, "bad value"))?,
                c.parse().map_err(|_| bad(lineno, "bad count"))?,
            ),
            _ => return Err(bad(lineno, "expected `split` or `leaf`")),
        };
        items.push(item);
    }

    // resolve right-child links by walking the pre-order list
    fn walk(items: &[Item], pos: &mut usize, nodes: &mut Vec<Node>) -> Result<usize> {
        let id = *pos;
        let item = items
            .get(id)
            .ok_or_else(|| Error::Format("tree node list ends inside a split".into()))?;
        *pos += 1;
        match *item {
            Item::Leaf(value, count) => nodes.push(Node::Leaf { value, count }),
            Item::Split(feature, threshold) => {
                nodes.push(Node::Split {
                    feature,
                    threshold,
                    left: id + 1,
                    right: 0,
                });
                walk(items, pos, nodes)?;
                let r = walk(items, pos, nodes)?;
                if let Node::Split { right, .. } = &mut nodes[id] {
                    *right = r;
                }
            }
        }
        Ok(id)
    }
    let mut nodes = Vec::with_capacity(items.len());
    let mut pos = 0;
    walk(&items, &mut pos, &mut nodes)?;
    if pos != items.len() {
        return Err(Error::Format("extra nodes after the tree".into()));
    }
    RegressionTree::from_nodes(nodes, n_features)
}
