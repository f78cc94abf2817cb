use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::Result;
use crate::journal::Mark;

/// Snapshot of a structure's node-inspection counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Visits {
    /// Cumulative inspections since creation.
    pub total: u64,
    /// Inspections made by the most recent insert or lookup.
    pub last: u64,
}

/// Interior-mutable counters so read-only operations can still record cost.
#[derive(Debug, Default)]
pub struct VisitCounter {
    total: AtomicU64,
    last: AtomicU64,
}

impl VisitCounter {
    pub(crate) fn record(&self, visits: u64) {
        self.total.fetch_add(visits, Ordering::Relaxed);
        self.last.store(visits, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> Visits {
        Visits {
            total: self.total.load(Ordering::Relaxed),
            last: self.last.load(Ordering::Relaxed),
        }
    }
}

/// A value that changes over time: append a new current value, read the
/// current value, and backtrack to earlier states.
pub trait History<V> {
    fn insert(&mut self, value: V);
    fn lookup(&self) -> Result<&V>;
    fn mark(&mut self) -> Mark;
    fn undo_to(&mut self, mark: &Mark) -> Result<()>;
    fn release(&mut self, mark: &Mark) -> Result<()>;
    /// Surviving values in insertion order.
    fn flatten(&self) -> Vec<V>;
    fn visits(&self) -> Visits;
}
