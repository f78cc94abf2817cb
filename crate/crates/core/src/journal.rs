//! Write-once slots backed by an append-only node arena, with a trail that
//! records every binding so it can be undone in LIFO order.
//!
//! This is the logic-variable half of a Prolog heap: a [`SlotId`] is a free
//! variable until [`Journal::bind`] instantiates it with a node, and
//! [`Journal::undo_to`] backtracks to a [`Mark`] (a choice point).

use std::num::NonZeroU32;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

static NEXT_JOURNAL_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotId(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl SlotId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Observable state of a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Empty,
    Filled(NodeId),
}

impl Slot {
    pub fn is_empty(self) -> bool {
        matches!(self, Slot::Empty)
    }

    pub fn node(self) -> Option<NodeId> {
        match self {
            Slot::Empty => None,
            Slot::Filled(n) => Some(n),
        }
    }
}

/// A choice point: a position in the trail of one particular journal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mark {
    journal: u64,
    serial: u64,
    position: usize,
}

impl Mark {
    pub fn position(&self) -> usize {
        self.position
    }
}

/// Slot and node storage plus the trail governing the slots.
///
/// Nodes are never freed. Undoing a binding empties the slot but leaves the
/// node it pointed to in the arena.
#[derive(Debug)]
pub struct Journal<N> {
    id: u64,
    // node index + 1, so an empty slot costs no extra tag
    slots: Vec<Option<NonZeroU32>>,
    nodes: Vec<N>,
    trail: Vec<SlotId>,
    // live marks, oldest first: (serial, position)
    marks: Vec<(u64, usize)>,
    next_serial: u64,
}

impl<N> Default for Journal<N> {
    fn default() -> Self {
        Self::new()
    }
}

impl<N> Journal<N> {
    pub fn new() -> Self {
        Journal {
            id: NEXT_JOURNAL_ID.fetch_add(1, Ordering::Relaxed),
            slots: Vec::new(),
            nodes: Vec::new(),
            trail: Vec::new(),
            marks: Vec::new(),
            next_serial: 0,
        }
    }

    /// Identity used to tie marks and handles to this journal.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn new_slot(&mut self) -> SlotId {
        let id = SlotId(u32::try_from(self.slots.len()).expect("slot arena overflow"));
        self.slots.push(None);
        id
    }

    pub fn read(&self, slot: SlotId) -> Slot {
        match self.slots[slot.index()] {
            None => Slot::Empty,
            Some(n) => Slot::Filled(NodeId(n.get() - 1)),
        }
    }

    pub fn node(&self, id: NodeId) -> &N {
        &self.nodes[id.index()]
    }

    /// The node held by `slot`, if any.
    pub fn get(&self, slot: SlotId) -> Option<&N> {
        self.slots[slot.index()].map(|n| &self.nodes[n.get() as usize - 1])
    }

    /// Places a node in the arena without binding it anywhere.
    pub fn alloc(&mut self, node: N) -> NodeId {
        let id = NodeId(
            u32::try_from(self.nodes.len())
                .ok()
                .filter(|&i| i < u32::MAX)
                .expect("node arena overflow"),
        );
        self.nodes.push(node);
        id
    }

    /// Binds an empty slot and records the binding on the trail.
    ///
    /// Panics if the slot is already filled: slots are write-once.
    pub fn bind(&mut self, slot: SlotId, node: NodeId) {
        let cell = &mut self.slots[slot.index()];
        assert!(
            cell.is_none(),
            "write-once violation: slot {} is already bound",
            slot.0
        );
        *cell = NonZeroU32::new(node.0 + 1);
        self.trail.push(slot);
    }

    /// `alloc` followed by `bind`.
    pub fn bind_new(&mut self, slot: SlotId, node: N) -> NodeId {
        let id = self.alloc(node);
        self.bind(slot, id);
        id
    }

    pub fn mark(&mut self) -> Mark {
        let serial = self.next_serial;
        self.next_serial += 1;
        let position = self.trail.len();
        self.marks.push((serial, position));
        Mark {
            journal: self.id,
            serial,
            position,
        }
    }

    fn live_index(&self, mark: &Mark) -> Result<usize> {
        assert_eq!(
            mark.journal, self.id,
            "mark belongs to journal {}, used with journal {}",
            mark.journal, self.id
        );
        self.marks
            .iter()
            .rposition(|&(serial, _)| serial == mark.serial)
            .ok_or(Error::StaleMark)
    }

    /// Empties every slot bound after `mark` and invalidates younger marks.
    /// `mark` itself stays valid and can be undone to again.
    pub fn undo_to(&mut self, mark: &Mark) -> Result<()> {
        let idx = self.live_index(mark)?;
        self.marks.truncate(idx + 1);
        debug_assert!(mark.position <= self.trail.len());
        while self.trail.len() > mark.position {
            let slot = self.trail.pop().expect("trail shorter than mark");
            self.slots[slot.index()] = None;
        }
        Ok(())
    }

    /// Drops `mark` and every younger mark without touching any binding.
    pub fn release(&mut self, mark: &Mark) -> Result<()> {
        let idx = self.live_index(mark)?;
        self.marks.truncate(idx);
        Ok(())
    }

    pub fn is_live(&self, mark: &Mark) -> bool {
        mark.journal == self.id && self.marks.iter().any(|&(s, _)| s == mark.serial)
    }

    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    pub fn live_marks(&self) -> usize {
        self.marks.len()
    }

    /// Nodes ever allocated, dead ones included.
    pub fn arena_len(&self) -> usize {
        self.nodes.len()
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// Every slot ever created, oldest first.
    pub fn slot_ids(&self) -> impl Iterator<Item = SlotId> {
        (0..self.slots.len() as u32).map(SlotId)
    }

    /// Number of slots currently filled.
    pub fn bound_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    /// Slot-by-slot state, for snapshot comparisons.
    pub fn snapshot(&self) -> Vec<Slot> {
        (0..self.slots.len())
            .map(|i| self.read(SlotId(i as u32)))
            .collect()
    }
}
