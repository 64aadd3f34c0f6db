//! On-chip cache of the explicit per-group status bits.

pub const DEFAULT_METADATA_CACHE_BYTES: usize = 32 * 1024;
pub const DEFAULT_METADATA_ASSOC: usize = 16;
const BLOCK_BYTES: usize = 64;
/// 3-bit entries per 64-byte block.
pub const GROUPS_PER_BLOCK: u64 = (BLOCK_BYTES as u64 * 8) / 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MetaAccess {
    pub miss: bool,
    /// A dirty block was evicted to make room.
    pub dirty_eviction: bool,
}

#[derive(Debug, Clone)]
struct Block {
    id: u64,
    dirty: bool,
    lru: u64,
}

#[derive(Debug, Clone)]
pub struct MetadataCache {
    sets: Vec<Vec<Block>>,
    assoc: usize,
    clock: u64,
}

impl MetadataCache {
    /// Panics unless `bytes` holds a whole number of `assoc`-way sets.
    pub fn new(bytes: usize, assoc: usize) -> Self {
        let blocks = bytes / BLOCK_BYTES;
        assert!(
            assoc > 0 && blocks >= assoc && blocks.is_multiple_of(assoc),
            "bad metadata cache geometry"
        );
        MetadataCache {
            sets: vec![Vec::with_capacity(assoc); blocks / assoc],
            assoc,
            clock: 0,
        }
    }

    pub fn block_of(group: u64) -> u64 {
        group / GROUPS_PER_BLOCK
    }

    /// Groups covered when the whole cache is filled.
    pub fn reach_groups(&self) -> u64 {
        (self.sets.len() * self.assoc) as u64 * GROUPS_PER_BLOCK
    }

    pub fn access(&mut self, group: u64, make_dirty: bool) -> MetaAccess {
        self.clock += 1;
        let id = Self::block_of(group);
        let n = self.sets.len() as u64;
        let set = &mut self.sets[(id % n) as usize];
        if let Some(b) = set.iter_mut().find(|b| b.id == id) {
            b.lru = self.clock;
            b.dirty |= make_dirty;
            return MetaAccess::default();
        }
        let mut out = MetaAccess {
            miss: true,
            dirty_eviction: false,
        };
        if set.len() == self.assoc {
            let (pos, _) = set.iter().enumerate().min_by_key(|(_, b)| b.lru).unwrap();
            out.dirty_eviction = set.swap_remove(pos).dirty;
        }
        set.push(Block {
            id,
            dirty: make_dirty,
            lru: self.clock,
        });
        out
    }
}
