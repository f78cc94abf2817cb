//! Open-ended list: a chain of cons cells ending in an empty slot. The last
//! cell before the open end holds the current value, so both insert and
//! lookup walk the whole chain.

use std::fmt::{Display, Write};

use crate::error::{Error, Result};
use crate::history::{History, VisitCounter, Visits};
use crate::journal::{Journal, Mark, Slot, SlotId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cons<V> {
    pub value: V,
    pub next: SlotId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ListHandle {
    journal: u64,
    head: SlotId,
}

impl ListHandle {
    pub fn head(&self) -> SlotId {
        self.head
    }
}

#[derive(Debug)]
pub struct OpenList<V> {
    journal: Journal<Cons<V>>,
    head: ListHandle,
    counter: VisitCounter,
}

impl<V> Default for OpenList<V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V> OpenList<V> {
    pub fn new() -> Self {
        let mut journal = Journal::new();
        let head = ListHandle {
            journal: journal.id(),
            head: journal.new_slot(),
        };
        OpenList {
            journal,
            head,
            counter: VisitCounter::default(),
        }
    }

    pub fn handle(&self) -> ListHandle {
        self.head
    }

    pub fn journal(&self) -> &Journal<Cons<V>> {
        &self.journal
    }

    pub fn visits(&self) -> Visits {
        self.counter.snapshot()
    }

    fn check_handle(&self, h: &ListHandle) {
        assert_eq!(
            h.journal,
            self.journal.id(),
            "list handle used with a different list"
        );
    }

    /// Walks to the open end. Returns the open slot, the last cell's slot
    /// (if any) and the number of cells passed.
    fn walk(&self, h: &ListHandle) -> (SlotId, Option<SlotId>, u64) {
        let mut slot = h.head;
        let mut last = None;
        let mut cells = 0;
        while let Slot::Filled(n) = self.journal.read(slot) {
            last = Some(slot);
            slot = self.journal.node(n).next;
            cells += 1;
        }
        (slot, last, cells)
    }

    pub fn insert(&mut self, value: V) {
        let h = self.head;
        self.insert_at(&h, value);
    }

    pub fn insert_at(&mut self, h: &ListHandle, value: V) {
        self.check_handle(h);
        let (open, _, cells) = self.walk(h);
        let next = self.journal.new_slot();
        self.journal.bind_new(open, Cons { value, next });
        self.counter.record(cells + 1);
    }

    pub fn lookup(&self) -> Result<&V> {
        self.lookup_at(&self.head)
    }

    pub fn lookup_at(&self, h: &ListHandle) -> Result<&V> {
        self.check_handle(h);
        let (_, last, cells) = self.walk(h);
        let last = last.ok_or(Error::EmptyList)?;
        self.counter.record(cells);
        Ok(&self.journal.get(last).expect("filled").value)
    }

    pub fn rebase(&self) -> Result<ListHandle> {
        self.rebase_at(&self.head)
    }

    /// A handle starting at the last cell: same current value, shared tail.
    pub fn rebase_at(&self, h: &ListHandle) -> Result<ListHandle> {
        self.check_handle(h);
        let (_, last, _) = self.walk(h);
        Ok(ListHandle {
            journal: h.journal,
            head: last.ok_or(Error::EmptyList)?,
        })
    }

    pub fn len(&self) -> usize {
        self.walk(&self.head).2 as usize
    }

    pub fn is_empty(&self) -> bool {
        self.journal.read(self.head.head).is_empty()
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
}

impl<V: Clone> OpenList<V> {
    pub fn flatten(&self) -> Vec<V> {
        self.flatten_at(&self.head)
    }

    pub fn flatten_at(&self, h: &ListHandle) -> Vec<V> {
        self.values_at(h).cloned().collect()
    }
}

impl<V> OpenList<V> {
    pub fn values(&self) -> impl Iterator<Item = &V> + '_ {
        self.values_at(&self.head)
    }

    pub fn values_at(&self, h: &ListHandle) -> impl Iterator<Item = &V> + '_ {
        self.check_handle(h);
        let mut slot = h.head;
        std::iter::from_fn(move || {
            let cell = self.journal.get(slot)?;
            slot = cell.next;
            Some(&cell.value)
        })
    }
}

impl<V: Display> OpenList<V> {
    /// `[v1,v2,...|_]`, or `_` when empty.
    pub fn render(&self) -> String {
        self.render_at(&self.head)
    }

    pub fn render_at(&self, h: &ListHandle) -> String {
        self.check_handle(h);
        let mut slot = h.head;
        let mut out = String::new();
        while let Some(cell) = self.journal.get(slot) {
            out.push(if out.is_empty() { '[' } else { ',' });
            let _ = write!(out, "{}", cell.value);
            slot = cell.next;
        }
        if out.is_empty() {
            "_".to_string()
        } else {
            out.push_str("|_]");
            out
        }
    }
}

impl<V: Clone> History<V> for OpenList<V> {
    fn insert(&mut self, value: V) {
        OpenList::insert(self, value)
    }

    fn lookup(&self) -> Result<&V> {
        OpenList::lookup(self)
    }

    fn mark(&mut self) -> Mark {
        OpenList::mark(self)
    }

    fn undo_to(&mut self, mark: &Mark) -> Result<()> {
        OpenList::undo_to(self, mark)
    }

    fn release(&mut self, mark: &Mark) -> Result<()> {
        OpenList::release(self, mark)
    }

    fn flatten(&self) -> Vec<V> {
        OpenList::flatten(self)
    }

    fn visits(&self) -> Visits {
        OpenList::visits(self)
    }
}
