//! Canonical text form: `_` for an empty slot, `tree(L,V,R)` for a branch,
//! `leaf(V)` for a compact leaf. No whitespace. Depth annotations are not
//! written.

use std::fmt::{Display, Write};
use std::str::FromStr;

use super::{Config, OpenTree, TreeHandle, TreeNode};
use crate::error::{Error, Result};
use crate::journal::SlotId;

impl<V: Display> OpenTree<V> {
    pub fn render(&self) -> String {
        self.render_at(&self.root)
    }

    pub fn render_at(&self, h: &TreeHandle) -> String {
        self.check_handle(h);
        let mut out = String::new();
        self.render_slot(h.root, &mut out);
        out
    }

    fn render_slot(&self, slot: SlotId, out: &mut String) {
        match self.journal.get(slot) {
            None => out.push('_'),
            Some(TreeNode::Leaf(v)) => {
                let _ = write!(out, "leaf({v})");
            }
            Some(TreeNode::Branch {
                left, value, right, ..
            }) => {
                out.push_str("tree(");
                self.render_slot(*left, out);
                let _ = write!(out, ",{value},");
                self.render_slot(*right, out);
                out.push(')');
            }
        }
    }
}

impl<V: FromStr> OpenTree<V> {
    /// Builds a tree from its canonical text without enforcing any
    /// structural rule, so malformed shapes can be fed to
    /// [`OpenTree::validate`]. Collectors of depth-annotated configs get
    /// the limit their spine position implies.
    pub fn from_term(config: Config, text: &str) -> Result<Self> {
        let mut tree = OpenTree::new(config)?;
        let mut p = Parser { text, pos: 0 };
        let root = tree.root.root;
        p.slot(&mut tree, root, Some(config.start_depth))?;
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(tree)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.text[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{tok}`")))
        }
    }

    fn value<V: FromStr>(&mut self) -> Result<V> {
        let rest = &self.text[self.pos..];
        let end = rest.find([',', ')', '(']).unwrap_or(rest.len());
        let v = rest[..end]
            .parse()
            .map_err(|_| self.error("bad value"))?;
        self.pos += end;
        Ok(v)
    }

    /// `collector` carries the subtree limit when `slot` is on the spine.
    fn slot<V: FromStr>(
        &mut self,
        tree: &mut OpenTree<V>,
        slot: SlotId,
        collector: Option<u32>,
    ) -> Result<()> {
        if self.eat("_") {
            return Ok(());
        }
        if self.eat("leaf(") {
            let v = self.value()?;
            self.expect(")")?;
            tree.journal.bind_new(slot, TreeNode::Leaf(v));
            return Ok(());
        }
        self.expect("tree(")?;
        let left = tree.journal.new_slot();
        let right = tree.journal.new_slot();
        self.slot(tree, left, None)?;
        self.expect(",")?;
        let value = self.value()?;
        self.expect(",")?;
        self.slot(tree, right, collector.map(|l| l + 1))?;
        self.expect(")")?;
        let limit = collector.filter(|_| tree.config.depth_annotated);
        tree.journal.bind_new(
            slot,
            TreeNode::Branch {
                left,
                value,
                right,
                limit,
            },
        );
        Ok(())
    }
}
