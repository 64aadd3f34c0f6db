//! Line location predictor: a direct-mapped table of the last compression
//! level seen per (hashed) page.

use crate::layout::Level;

pub const DEFAULT_LCT_ENTRIES: usize = 512;
pub const DEFAULT_PAGE_SIZE: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LlpUpdate {
    #[default]
    EveryAccess,
    MispredictOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LctConfig {
    pub entries: usize,
    pub page_size: u64,
    pub seed: u64,
    pub update: LlpUpdate,
}

impl Default for LctConfig {
    fn default() -> Self {
        LctConfig {
            entries: DEFAULT_LCT_ENTRIES,
            page_size: DEFAULT_PAGE_SIZE,
            seed: 0,
            update: LlpUpdate::EveryAccess,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Lct {
    table: Vec<Level>,
    lines_per_page: u64,
    seed: u64,
    update: LlpUpdate,
}

impl Lct {
    /// Panics on zero entries or a page smaller than a line.
    pub fn new(cfg: LctConfig) -> Self {
        assert!(cfg.entries > 0, "LCT needs at least one entry");
        assert!(cfg.page_size >= 64, "page size below one line");
        Lct {
            table: vec![Level::Uncompressed; cfg.entries],
            lines_per_page: cfg.page_size / 64,
            seed: cfg.seed,
            update: cfg.update,
        }
    }

    pub fn index(&self, line_addr: u64) -> usize {
        let page = line_addr / self.lines_per_page;
        let h = (page ^ self.seed).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        ((h >> 32) % self.table.len() as u64) as usize
    }

    pub fn predict(&self, line_addr: u64) -> Level {
        self.table[self.index(line_addr)]
    }

    /// Record the level a read resolved to, given what was predicted.
    pub fn update(&mut self, line_addr: u64, predicted: Level, observed: Level) {
        if self.update == LlpUpdate::EveryAccess || predicted != observed {
            let i = self.index(line_addr);
            self.table[i] = observed;
        }
    }

    /// Two bits per entry.
    pub fn storage_bytes(&self) -> usize {
        (self.table.len() * 2).div_ceil(8)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LlpStats {
    /// Reads whose line had more than one candidate slot.
    pub predictions: u64,
    pub first_probe_hits: u64,
}

impl LlpStats {
    pub fn record(&mut self, hit: bool) {
        self.predictions += 1;
        self.first_probe_hits += hit as u64;
    }

    /// 1.0 when no prediction was needed.
    pub fn accuracy(&self) -> f64 {
        if self.predictions == 0 {
            1.0
        } else {
            self.first_probe_hits as f64 / self.predictions as f64
        }
    }
}
