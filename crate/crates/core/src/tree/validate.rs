use std::fmt;

use super::{OpenTree, TreeHandle, TreeNode};
use crate::journal::SlotId;

/// Structural rule broken by a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// A subtree is deeper than its collector's limit.
    DepthLimit,
    /// A collector has a successor although its subtree is not complete.
    Completeness,
    /// Filled nodes of a subtree are not a prefix of its preorder.
    PreorderPrefix,
    /// Leaf where a branch belongs or vice versa.
    NodeKind,
    /// Stored collector limit missing, wrong, or present where none belongs.
    Annotation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    /// Steps from the handle's root: `L` for left, `R` for right.
    pub path: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.path.is_empty() {
            "root"
        } else {
            &self.path
        };
        write!(f, "{:?} violated at {at}", self.rule)
    }
}

impl std::error::Error for Violation {}

fn violation(rule: Rule, path: &str) -> Violation {
    Violation {
        rule,
        path: path.to_string(),
    }
}

impl<V> OpenTree<V> {
    pub fn validate(&self) -> Result<(), Violation> {
        self.validate_at(&self.root)
    }

    /// Checks the collector limits, completeness of every non-last subtree,
    /// the preorder fill of every subtree and, for compact trees, that
    /// exactly the nodes at maximal depth are leaves. Reports the first
    /// violation found.
    pub fn validate_at(&self, h: &TreeHandle) -> Result<(), Violation> {
        self.check_handle(h);
        let mut path = String::new();
        let mut slot = h.root;
        let mut limit = h.effective_start;
        while let Some(node) = self.journal.get(slot) {
            let TreeNode::Branch {
                left,
                right,
                limit: stored,
                ..
            } = node
            else {
                return Err(violation(Rule::NodeKind, &path));
            };
            let expected = self.config.depth_annotated.then_some(limit);
            if *stored != expected {
                return Err(violation(Rule::Annotation, &path));
            }
            let filled = self.check_subtree(*left, limit).map_err(|v| v.under(&path, 'L'))?;
            if !self.journal.read(*right).is_empty() && filled != full_size(limit) {
                return Err(violation(Rule::Completeness, &path));
            }
            slot = *right;
            path.push('R');
            limit += 1;
        }
        Ok(())
    }

    /// Returns the number of filled nodes under `slot`, which may hold a
    /// subtree of depth at most `budget`. Violation paths are relative to
    /// `slot`.
    fn check_subtree(&self, slot: SlotId, budget: u32) -> Result<u64, Violation> {
        let Some(node) = self.journal.get(slot) else {
            return Ok(0);
        };
        if budget == 0 {
            return Err(violation(Rule::DepthLimit, ""));
        }
        let (left, right, limit) = match node {
            TreeNode::Leaf(_) => {
                if self.config.compact_leaves && budget == 1 {
                    return Ok(1);
                }
                return Err(violation(Rule::NodeKind, ""));
            }
            TreeNode::Branch {
                left, right, limit, ..
            } => (*left, *right, *limit),
        };
        if self.config.compact_leaves && budget == 1 {
            return Err(violation(Rule::NodeKind, ""));
        }
        if limit.is_some() {
            return Err(violation(Rule::Annotation, ""));
        }
        let l = self
            .check_subtree(left, budget - 1)
            .map_err(|v| v.under("", 'L'))?;
        let r = self
            .check_subtree(right, budget - 1)
            .map_err(|v| v.under("", 'R'))?;
        if r > 0 && l != full_size(budget - 1) {
            return Err(violation(Rule::PreorderPrefix, ""));
        }
        Ok(1 + l + r)
    }
}

impl Violation {
    /// Re-roots the path: `prefix`, then `step`, then the old path.
    fn under(mut self, prefix: &str, step: char) -> Self {
        self.path = format!("{prefix}{step}{}", self.path);
        self
    }
}

/// Nodes in a complete binary tree of the given depth.
fn full_size(depth: u32) -> u64 {
    (1u64 << depth) - 1
}
