//! Human-readable rule listing.
//!
//! One line per node, two spaces of indent per level. Internal nodes read
//! `if f[<feature>] <= <threshold>`, leaves read `predict <value> (n=<count>)`.
//! The two children of a split follow it one level deeper, prefixed `then`
//! (the `<=` branch) and `else`:
//!
//! ```text
//! if f[3] <= 0.412000
//!   then predict 1.62 (n=97)
//!   else if f[0] <= 1.250000
//!     then predict 3.28 (n=311)
//!     else predict 3.41 (n=392)
//! ```
//!
//! Thresholds print with 6 decimals and leaf values with 2, so parsing a
//! listing gives a tree that is structurally identical and numerically equal
//! at the printed precision; re-exporting it reproduces the same text.

use std::fmt::Write as _;

use super::{Node, RegressionTree};
use crate::error::{Error, Result};

pub fn export_rules(tree: &RegressionTree) -> String {
    fn go(tree: &RegressionTree, i: usize, depth: usize, prefix: &str, out: &mut String) {
        let indent = "  ".repeat(depth);
        match tree.nodes()[i] {
            Node::Leaf { value, count } => {
                let _ = writeln!(out, "{indent}{prefix}predict {value:.2} (n={count})");
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let _ = writeln!(out, "{indent}{prefix}if f[{feature}] <= {threshold:.6}");
                go(tree, left, depth + 1, "then ", out);
                go(tree, right, depth + 1, "else ", out);
            }
        }
    }
    let mut out = String::new();
    go(tree, 0, 0, "", &mut out);
    out
}

struct Parser<'a> {
    lines: Vec<&'a str>,
    pos: usize,
    nodes: Vec<Node>,
    max_feature: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Format(format!("rules line {}: {msg}", self.pos + 1))
    }

    fn node(&mut self, depth: usize, prefix: &str) -> Result<usize> {
        let line = *self
            .lines
            .get(self.pos)
            .ok_or_else(|| self.err("unexpected end of rules"))?;
        let indent = "  ".repeat(depth);
        let body = line
            .strip_prefix(indent.as_str())
            .and_then(|l| l.strip_prefix(prefix))
            .filter(|l| !l.starts_with(' '))
            .ok_or_else(|| self.err(&format!("expected `{indent}{prefix}...`")))?;
        let id = self.nodes.len();

        if let Some(rest) = body.strip_prefix("predict ") {
            let (value, count) = rest
                .strip_suffix(')')
                .and_then(|r| r.split_once(" (n="))
                .ok_or_else(|| self.err("malformed leaf"))?;
            let value: f64 = value.parse().map_err(|_| self.err("bad leaf value"))?;
            let count: usize = count.parse().map_err(|_| self.err("bad leaf count"))?;
            self.nodes.push(Node::Leaf { value, count });
            self.pos += 1;
            return Ok(id);
        }

        let rest = body
            .strip_prefix("if f[")
            .ok_or_else(|| self.err("expected `if` or `predict`"))?;
        let (feature, threshold) = rest
            .split_once("] <= ")
            .ok_or_else(|| self.err("malformed condition"))?;
        let feature: usize = feature.parse().map_err(|_| self.err("bad feature index"))?;
        let threshold: f64 = threshold.parse().map_err(|_| self.err("bad threshold"))?;
        self.max_feature = self.max_feature.max(feature + 1);
        self.nodes.push(Node::Split {
            feature,
            threshold,
            left: id + 1,
            right: 0,
        });
        self.pos += 1;
        self.node(depth + 1, "then ")?;
        let right_id = self.node(depth + 1, "else ")?;
        if let Node::Split { right, .. } = &mut self.nodes[id] {
            *right = right_id;
        }
        Ok(id)
    }
}

/// Rebuild a tree from [`export_rules`] output. The feature count of the
/// result is `n_features`, which must exceed every index in the text.
pub fn parse_rules(text: &str, n_features: usize) -> Result<RegressionTree> {
    let mut p = Parser {
        lines: text.lines().filter(|l| !l.trim().is_empty()).collect(),
        pos: 0,
        nodes: Vec::new(),
        max_feature: 0,
    };
    p.node(0, "")?;
    if p.pos != p.lines.len() {
        return Err(p.err("trailing lines after the tree"));
    }
    if p.max_feature > n_features {
        return Err(Error::Format(format!(
            "rules reference feature {} but only {n_features} features exist",
            p.max_feature - 1
        )));
    }
    RegressionTree::from_nodes(p.nodes, n_features)
}
