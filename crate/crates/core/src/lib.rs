//! Open-ended trees: an append-only journal for a value that changes over
//! time, where reading the current value and appending a new one both cost
//! O(log M) node inspections after M updates.
//!
//! Slots are write-once and every binding is trailed, so any prefix of the
//! history can be restored by backtracking to a [`Mark`]. An open-ended list
//! ([`OpenList`], O(M) per operation) is provided as a baseline together
//! with a reference model, a differential fuzzer and a benchmark harness.

pub mod bench;
pub mod complexity;
mod error;
mod history;
pub mod journal;
pub mod list;
pub mod oracle;
pub mod tree;

pub use error::{Error, Result};
pub use history::{History, VisitCounter, Visits};
pub use journal::{Journal, Mark, NodeId, Slot, SlotId};
pub use list::{ListHandle, OpenList};
pub use tree::{Config, OpenTree, TreeHandle, TreeNode, TreeStats, Values};
