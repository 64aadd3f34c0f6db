use std::collections::HashSet;

/// On-chip entries in the default configuration.
pub const LIT_ENTRIES: usize = 16;

/// Bits of line address held per entry.
pub const LIT_ADDR_BITS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LitOverflow {
    /// Spill to a one-bit-per-line table in memory.
    MemoryMapped,
    /// Draw a new key and re-encode memory.
    Rekey,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LitEntry {
    pub valid: bool,
    pub line_addr: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LitDelta {
    None,
    Insert(u64),
    Remove(u64),
}

/// Side effect of applying a [`LitDelta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LitEffect {
    Unchanged,
    OnChip,
    /// One write to the in-memory inversion bitmap.
    BitmapWrite,
    /// The table is full and the overflow policy is [`LitOverflow::Rekey`];
    /// the delta was not applied.
    RekeyRequired,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LitProbe {
    pub inverted: bool,
    /// The lookup had to read the in-memory bitmap.
    pub bitmap_access: bool,
}

/// Line Inversion Table: which slots currently hold the complement of their
/// logical contents.
#[derive(Debug, Clone)]
pub struct Lit {
    entries: Vec<LitEntry>,
    overflow: LitOverflow,
    /// Once spilled, every inversion lookup and update goes to the in-memory
    /// bitmap. The set stands in for that bitmap's one-bits.
    spilled: bool,
    bitmap: HashSet<u64>,
    overflows: u64,
}

impl Lit {
    pub fn new(entries: usize, overflow: LitOverflow) -> Self {
        Lit {
            entries: vec![LitEntry::default(); entries],
            overflow,
            spilled: false,
            bitmap: HashSet::new(),
            overflows: 0,
        }
    }

    pub fn overflow_mode(&self) -> LitOverflow {
        self.overflow
    }

    pub fn is_spilled(&self) -> bool {
        self.spilled
    }

    pub fn overflow_count(&self) -> u64 {
        self.overflows
    }

    pub fn contains(&self, addr: u64) -> bool {
        if self.spilled {
            self.bitmap.contains(&addr)
        } else {
            self.entries.iter().any(|e| e.valid && e.line_addr == addr)
        }
    }

    pub fn probe(&self, addr: u64) -> LitProbe {
        LitProbe {
            inverted: self.contains(addr),
            bitmap_access: self.spilled,
        }
    }

    /// Valid on-chip entries plus spilled bits.
    pub fn occupancy(&self) -> usize {
        if self.spilled {
            self.bitmap.len()
        } else {
            self.entries.iter().filter(|e| e.valid).count()
        }
    }

    pub fn on_chip_valid(&self) -> usize {
        self.entries.iter().filter(|e| e.valid).count()
    }

    pub fn capacity(&self) -> usize {
        self.entries.len()
    }

    pub fn apply(&mut self, delta: LitDelta) -> LitEffect {
        match delta {
            LitDelta::None => LitEffect::Unchanged,
            LitDelta::Insert(addr) => self.insert(addr),
            LitDelta::Remove(addr) => self.remove(addr),
        }
    }

    fn insert(&mut self, addr: u64) -> LitEffect {
        if self.contains(addr) {
            return LitEffect::Unchanged;
        }
        if self.spilled {
            self.bitmap.insert(addr);
            return LitEffect::BitmapWrite;
        }
        if let Some(e) = self.entries.iter_mut().find(|e| !e.valid) {
            *e = LitEntry {
                valid: true,
                line_addr: addr,
            };
            return LitEffect::OnChip;
        }
        self.handle_overflow(addr)
    }

    fn remove(&mut self, addr: u64) -> LitEffect {
        if self.spilled {
            return if self.bitmap.remove(&addr) {
                LitEffect::BitmapWrite
            } else {
                LitEffect::Unchanged
            };
        }
        match self
            .entries
            .iter_mut()
            .find(|e| e.valid && e.line_addr == addr)
        {
            Some(e) => {
                e.valid = false;
                LitEffect::OnChip
            }
            None => LitEffect::Unchanged,
        }
    }

    /// Insert into a full table.
    pub fn handle_overflow(&mut self, addr: u64) -> LitEffect {
        self.overflows += 1;
        match self.overflow {
            LitOverflow::MemoryMapped => {
                self.spilled = true;
                for e in self.entries.iter_mut().filter(|e| e.valid) {
                    self.bitmap.insert(e.line_addr);
                    e.valid = false;
                }
                self.bitmap.insert(addr);
                LitEffect::BitmapWrite
            }
            LitOverflow::Rekey => LitEffect::RekeyRequired,
        }
    }

    /// Forget every inversion, e.g. before re-encoding memory under a new key.
    pub fn clear(&mut self) {
        self.entries.iter_mut().for_each(|e| e.valid = false);
        self.bitmap.clear();
    }

    /// On-chip storage in bytes: one valid bit plus the address per entry,
    /// rounded up to whole bytes per entry.
    pub fn storage_bytes(&self) -> usize {
        self.entries.len() * (1 + LIT_ADDR_BITS as usize).div_ceil(8)
    }
}
