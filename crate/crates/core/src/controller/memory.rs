use std::collections::HashMap;

use crate::layout::GroupState;
use crate::Line;

pub const DEFAULT_MEMORY_LINES: u64 = 1 << 20;

/// Slot images plus the true layout of every group.
///
/// Storage is sparse: a slot never written reads as zeros and a group never
/// written is uncompressed.
#[derive(Debug, Clone)]
pub struct Memory {
    capacity: u64,
    slots: HashMap<u64, Line>,
    states: HashMap<u64, GroupState>,
}

impl Memory {
    pub fn new(capacity_lines: u64) -> Self {
        Memory {
            capacity: capacity_lines,
            slots: HashMap::new(),
            states: HashMap::new(),
        }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn read(&self, addr: u64) -> Line {
        self.slots.get(&addr).copied().unwrap_or_default()
    }

    pub fn write(&mut self, addr: u64, raw: Line) {
        debug_assert!(addr < self.capacity);
        self.slots.insert(addr, raw);
    }

    pub fn state(&self, group: u64) -> GroupState {
        self.states.get(&group).copied().unwrap_or_default()
    }

    pub fn set_state(&mut self, group: u64, s: GroupState) {
        if s == GroupState::U {
            self.states.remove(&group);
        } else {
            self.states.insert(group, s);
        }
    }

    /// Addresses of every slot ever written, ascending.
    pub fn written_slots(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.slots.keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// Groups not in the uncompressed state.
    pub fn compressed_groups(&self) -> usize {
        self.states.len()
    }
}
