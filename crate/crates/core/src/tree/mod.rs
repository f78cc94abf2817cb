//! The open-ended tree.
//!
//! Values live in a right spine of *collector* nodes. The k-th collector
//! holds one value and owns a left subtree limited to depth
//! `start + k - 1`, filled in preorder. A new collector is created only once
//! the previous collector's subtree is complete, so both the spine and the
//! last subtree stay logarithmic in the number of stored values and the
//! current value is always the rightmost filled node.

mod term;
mod validate;

pub use validate::{Rule, Violation};

use crate::error::{Error, Result};
use crate::history::{History, VisitCounter, Visits};
use crate::journal::{Journal, Mark, Slot, SlotId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Config {
    /// Depth limit of the first collector's subtree.
    pub start_depth: u32,
    /// Store each collector's depth limit in the node so the spine walk need
    /// not count, and so handles can be rebased onto lower collectors.
    pub depth_annotated: bool,
    /// Store values at maximal depth as childless leaves.
    pub compact_leaves: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            start_depth: 1,
            depth_annotated: false,
            compact_leaves: false,
        }
    }
}

impl Config {
    pub fn with_start_depth(start_depth: u32) -> Self {
        Config {
            start_depth,
            ..Config::default()
        }
    }

    pub fn depth_annotated(mut self, on: bool) -> Self {
        self.depth_annotated = on;
        self
    }

    pub fn compact_leaves(mut self, on: bool) -> Self {
        self.compact_leaves = on;
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.start_depth < 1 {
            return Err(Error::BadConfig(format!(
                "start depth must be at least 1, got {}",
                self.start_depth
            )));
        }
        Ok(())
    }

    /// Every combination of the variant flags over the given start depths.
    pub fn grid(start_depths: &[u32]) -> Vec<Config> {
        let mut out = Vec::new();
        for &d in start_depths {
            for annotated in [false, true] {
                for compact in [false, true] {
                    out.push(
                        Config::with_start_depth(d)
                            .depth_annotated(annotated)
                            .compact_leaves(compact),
                    );
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode<V> {
    Branch {
        left: SlotId,
        value: V,
        right: SlotId,
        /// Depth limit of the left subtree; set on collectors of
        /// depth-annotated trees only.
        limit: Option<u32>,
    },
    Leaf(V),
}

impl<V> TreeNode<V> {
    pub fn value(&self) -> &V {
        match self {
            TreeNode::Branch { value, .. } | TreeNode::Leaf(value) => value,
        }
    }

    pub fn children(&self) -> Option<(SlotId, SlotId)> {
        match *self {
            TreeNode::Branch { left, right, .. } => Some((left, right)),
            TreeNode::Leaf(_) => None,
        }
    }
}

/// Entry point into a tree: the slot holding its root collector and the
/// depth limit of that collector's subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeHandle {
    journal: u64,
    root: SlotId,
    effective_start: u32,
}

impl TreeHandle {
    pub fn root(&self) -> SlotId {
        self.root
    }

    pub fn effective_start(&self) -> u32 {
        self.effective_start
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TreeStats {
    pub update_count: u64,
    pub collector_count: u64,
    /// Deepest filled node, counting the root as depth 1.
    pub max_node_depth: u32,
    pub node_count: u64,
    /// Nodes at the maximal depth of their subtree.
    pub leaf_count: u64,
}

/// What kind of node an empty slot will receive.
#[derive(Debug, Clone, Copy)]
enum Position {
    /// A spine slot; the new collector's subtree has this limit.
    Collector(u32),
    /// A slot inside a collector's subtree with this remaining depth.
    Subtree(u32),
}

/// An open-ended tree together with the journal that stores it.
///
/// Several [`TreeHandle`]s may point into the same structure (see
/// [`OpenTree::rebase`]); the `*_at` methods operate through a given handle,
/// the plain methods through the original root.
#[derive(Debug)]
pub struct OpenTree<V> {
    journal: Journal<TreeNode<V>>,
    config: Config,
    root: TreeHandle,
    counter: VisitCounter,
}

impl<V> OpenTree<V> {
    pub fn new(config: Config) -> Result<Self> {
        config.check()?;
        let mut journal = Journal::new();
        let root = journal.new_slot();
        let root = TreeHandle {
            journal: journal.id(),
            root,
            effective_start: config.start_depth,
        };
        Ok(OpenTree {
            journal,
            config,
            root,
            counter: VisitCounter::default(),
        })
    }

    pub fn config(&self) -> Config {
        self.config
    }

    pub fn handle(&self) -> TreeHandle {
        self.root
    }

    pub fn journal(&self) -> &Journal<TreeNode<V>> {
        &self.journal
    }

    /// Direct access to the slots, bypassing every structural rule.
    pub fn journal_mut(&mut self) -> &mut Journal<TreeNode<V>> {
        &mut self.journal
    }

    pub fn visits(&self) -> Visits {
        self.counter.snapshot()
    }

    fn check_handle(&self, h: &TreeHandle) {
        assert_eq!(
            h.journal,
            self.journal.id(),
            "tree handle used with a different tree"
        );
    }

    fn make_node(&mut self, value: V, pos: Position) -> TreeNode<V> {
        match pos {
            Position::Collector(limit) => self.branch(value, self.config.depth_annotated.then_some(limit)),
            Position::Subtree(1) if self.config.compact_leaves => TreeNode::Leaf(value),
            Position::Subtree(_) => self.branch(value, None),
        }
    }

    fn branch(&mut self, value: V, limit: Option<u32>) -> TreeNode<V> {
        TreeNode::Branch {
            left: self.journal.new_slot(),
            value,
            right: self.journal.new_slot(),
            limit,
        }
    }

    fn place(&mut self, slot: SlotId, value: V, pos: Position) {
        let node = self.make_node(value, pos);
        self.journal.bind_new(slot, node);
    }

    pub fn insert(&mut self, value: V) {
        let h = self.root;
        self.insert_at(&h, value);
    }

    /// Stores `value` as the new rightmost node.
    ///
    /// Walks the spine to the last collector, then descends its subtree with
    /// a depth budget, remembering the most recent empty right slot passed
    /// on the way (`back`). The value goes into the first empty slot met, or
    /// into `back` once the budget runs out.
    pub fn insert_at(&mut self, h: &TreeHandle, value: V) {
        self.check_handle(h);
        let Some(mut collector) = self.journal.get(h.root) else {
            self.place(h.root, value, Position::Collector(h.effective_start));
            self.counter.record(1);
            return;
        };
        let mut visits = 1;
        let mut limit = h.effective_start;
        let (mut left, mut right) = collector.children().expect("collector is a leaf");
        while let Slot::Filled(next) = self.journal.read(right) {
            collector = self.journal.node(next);
            (left, right) = collector.children().expect("collector is a leaf");
            limit += 1;
            visits += 1;
        }
        if self.config.depth_annotated {
            if let TreeNode::Branch { limit: Some(l), .. } = collector {
                limit = *l;
            }
        }

        let mut slot = left;
        let mut budget = limit;
        let mut back = (right, Position::Collector(limit + 1));
        loop {
            visits += 1;
            let Some(node) = self.journal.get(slot) else {
                self.place(slot, value, Position::Subtree(budget));
                break;
            };
            if budget == 1 {
                self.place(back.0, value, back.1);
                break;
            }
            let (l, r) = node.children().expect("leaf above maximal depth");
            if self.journal.read(r).is_empty() {
                back = (r, Position::Subtree(budget - 1));
                slot = l;
            } else {
                slot = r;
            }
            budget -= 1;
        }
        self.counter.record(visits);
    }

    pub fn lookup(&self) -> Result<&V> {
        self.lookup_at(&self.root)
    }

    /// Returns the current value: the last filled node in a depth-first,
    /// left-to-right traversal.
    pub fn lookup_at(&self, h: &TreeHandle) -> Result<&V> {
        self.check_handle(h);
        let mut node = self.journal.get(h.root).ok_or(Error::EmptyTree)?;
        let mut visits = 1;
        loop {
            let next = match node {
                TreeNode::Leaf(_) => None,
                TreeNode::Branch { left, right, .. } => {
                    self.journal.get(*right).or_else(|| self.journal.get(*left))
                }
            };
            match next {
                Some(n) => {
                    node = n;
                    visits += 1;
                }
                None => break,
            }
        }
        self.counter.record(visits);
        Ok(node.value())
    }

    /// Collector nodes from `h` downwards, with their subtree limits.
    fn spine(&self, h: &TreeHandle) -> Vec<(SlotId, &TreeNode<V>, u32)> {
        let mut out = Vec::new();
        let mut slot = h.root;
        let mut limit = h.effective_start;
        while let Some(node) = self.journal.get(slot) {
            out.push((slot, node, limit));
            match node.children() {
                Some((_, right)) => slot = right,
                None => break,
            }
            limit += 1;
        }
        out
    }

    /// Replaces the root by the deepest collector. Only depth-annotated trees
    /// know the limit of an arbitrary collector, so only they can do this.
    pub fn rebase(&self) -> Result<TreeHandle> {
        self.rebase_at(&self.root)
    }

    pub fn rebase_at(&self, h: &TreeHandle) -> Result<TreeHandle> {
        self.check_handle(h);
        if !self.config.depth_annotated {
            return Err(Error::NeedsDepthAnnotation);
        }
        let spine = self.spine(h);
        let &(slot, node, counted) = spine.last().ok_or(Error::EmptyTree)?;
        let limit = match node {
            TreeNode::Branch { limit: Some(l), .. } => *l,
            _ => counted,
        };
        Ok(TreeHandle {
            journal: h.journal,
            root: slot,
            effective_start: limit,
        })
    }

    pub fn stats(&self) -> TreeStats {
        self.stats_at(&self.root)
    }

    pub fn stats_at(&self, h: &TreeHandle) -> TreeStats {
        self.check_handle(h);
        let mut st = TreeStats::default();
        for (depth, (_, node, limit)) in self.spine(h).into_iter().enumerate() {
            let depth = depth as u32 + 1;
            st.collector_count += 1;
            st.node_count += 1;
            st.max_node_depth = st.max_node_depth.max(depth);
            if let Some((left, _)) = node.children() {
                let mut stack = vec![(left, depth + 1, limit)];
                while let Some((slot, d, budget)) = stack.pop() {
                    let Some(n) = self.journal.get(slot) else { continue };
                    st.node_count += 1;
                    st.max_node_depth = st.max_node_depth.max(d);
                    if budget == 1 {
                        st.leaf_count += 1;
                    }
                    if let Some((l, r)) = n.children() {
                        stack.push((r, d + 1, budget.saturating_sub(1)));
                        stack.push((l, d + 1, budget.saturating_sub(1)));
                    }
                }
            }
        }
        st.update_count = st.node_count;
        st
    }

    pub fn mark(&mut self) -> Mark {
        self.journal.mark()
    }

    pub fn undo_to(&mut self, mark: &Mark) -> Result<()> {
        self.journal.undo_to(mark)
    }

    pub fn release(&mut self, mark: &Mark) -> Result<()> {
        self.journal.release(mark)
    }

    pub fn is_empty(&self) -> bool {
        self.journal.read(self.root.root).is_empty()
    }
}

impl<V: Clone> OpenTree<V> {
    pub fn flatten(&self) -> Vec<V> {
        self.flatten_at(&self.root)
    }

    pub fn flatten_at(&self, h: &TreeHandle) -> Vec<V> {
        self.values_at(h).cloned().collect()
    }
}

impl<V> OpenTree<V> {
    pub fn values(&self) -> Values<'_, V> {
        self.values_at(&self.root)
    }

    /// Values in insertion order: each collector's value followed by the
    /// preorder of its subtree.
    pub fn values_at(&self, h: &TreeHandle) -> Values<'_, V> {
        self.check_handle(h);
        Values {
            journal: &self.journal,
            collector: Some(h.root),
            stack: Vec::new(),
        }
    }
}

pub struct Values<'a, V> {
    journal: &'a Journal<TreeNode<V>>,
    collector: Option<SlotId>,
    stack: Vec<SlotId>,
}

impl<'a, V> Iterator for Values<'a, V> {
    type Item = &'a V;

    fn next(&mut self) -> Option<&'a V> {
        while let Some(slot) = self.stack.pop() {
            if let Some(n) = self.journal.get(slot) {
                if let Some((l, r)) = n.children() {
                    self.stack.push(r);
                    self.stack.push(l);
                }
                return Some(n.value());
            }
        }
        let node = self.journal.get(self.collector.take()?)?;
        if let Some((l, r)) = node.children() {
            self.stack.push(l);
            self.collector = Some(r);
        }
        Some(node.value())
    }
}

impl<V: Clone> History<V> for OpenTree<V> {
    fn insert(&mut self, value: V) {
        OpenTree::insert(self, value)
    }

    fn lookup(&self) -> Result<&V> {
        OpenTree::lookup(self)
    }

    fn mark(&mut self) -> Mark {
        OpenTree::mark(self)
    }

    fn undo_to(&mut self, mark: &Mark) -> Result<()> {
        OpenTree::undo_to(self, mark)
    }

    fn release(&mut self, mark: &Mark) -> Result<()> {
        OpenTree::release(self, mark)
    }

    fn flatten(&self) -> Vec<V> {
        OpenTree::flatten(self)
    }

    fn visits(&self) -> Visits {
        OpenTree::visits(self)
    }
}

#[cfg(test)]
mod tests;
