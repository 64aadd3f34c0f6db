//! Set-associative write-back last-level cache with LRU replacement.
//!
//! Set index is taken from the group number, so the four lines of a group
//! always share a set: ganged eviction stays within one set and sampled sets
//! hold whole groups.

use thiserror::Error;

use crate::layout::Level;
use crate::{group_of, index_in_group, Line, GROUP_LINES};

pub const DEFAULT_LLC_CAPACITY: usize = 8 << 20;
pub const DEFAULT_LLC_ASSOC: usize = 16;
pub const DEFAULT_SAMPLED_FRACTION: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LlcError {
    #[error("LLC of {capacity} bytes, {assoc}-way gives {sets} sets, not a power of two")]
    SetsNotPowerOfTwo {
        capacity: usize,
        assoc: usize,
        sets: usize,
    },
    #[error("associativity {0} cannot hold a four-line group")]
    AssocTooSmall(usize),
    #[error("sampled fraction {0} outside [0, 1]")]
    BadFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheConfig {
    pub capacity: usize,
    pub assoc: usize,
    pub sampled_fraction: f64,
}

impl Default for CacheConfig {
    fn default() -> Self {
        CacheConfig {
            capacity: DEFAULT_LLC_CAPACITY,
            assoc: DEFAULT_LLC_ASSOC,
            sampled_fraction: DEFAULT_SAMPLED_FRACTION,
        }
    }
}

impl CacheConfig {
    pub fn sets(&self) -> usize {
        self.capacity / (self.assoc * 64)
    }

    pub fn validate(&self) -> Result<(), LlcError> {
        if self.assoc < GROUP_LINES as usize {
            return Err(LlcError::AssocTooSmall(self.assoc));
        }
        let sets = self.sets();
        if sets == 0 || !sets.is_power_of_two() || sets * self.assoc * 64 != self.capacity {
            return Err(LlcError::SetsNotPowerOfTwo {
                capacity: self.capacity,
                assoc: self.assoc,
                sets,
            });
        }
        if !(0.0..=1.0).contains(&self.sampled_fraction) {
            return Err(LlcError::BadFraction(self.sampled_fraction));
        }
        Ok(())
    }

    /// Every `stride`-th set is sampled; `None` when no set is.
    pub fn sample_stride(&self) -> Option<usize> {
        (self.sampled_fraction > 0.0)
            .then(|| (1.0 / self.sampled_fraction).round().max(1.0) as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheLine {
    pub addr: u64,
    pub data: Line,
    pub dirty: bool,
    /// Level the line was stored at when fetched.
    pub prior: Level,
    /// Brought in by a packed fill and not yet demanded.
    pub prefetched: bool,
    /// Sampled sets only.
    pub reuse: Option<bool>,
    /// Sampled sets only.
    pub core_id: Option<u8>,
    lru: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    /// `benefit` carries the owning core when this hit was the first demand
    /// use of a prefetched line in a sampled set.
    Hit {
        benefit: Option<u8>,
    },
    Miss,
}

#[derive(Debug, Clone)]
pub struct Llc {
    cfg: CacheConfig,
    sets: Vec<Vec<CacheLine>>,
    set_mask: u64,
    stride: Option<usize>,
    clock: u64,
}

impl Llc {
    pub fn new(cfg: CacheConfig) -> Result<Self, LlcError> {
        cfg.validate()?;
        let n = cfg.sets();
        Ok(Llc {
            cfg,
            sets: (0..n).map(|_| Vec::with_capacity(cfg.assoc)).collect(),
            set_mask: n as u64 - 1,
            stride: cfg.sample_stride(),
            clock: 0,
        })
    }

    pub fn config(&self) -> &CacheConfig {
        &self.cfg
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn set_of(&self, addr: u64) -> usize {
        (group_of(addr) & self.set_mask) as usize
    }

    pub fn is_sampled(&self, set: usize) -> bool {
        self.stride.is_some_and(|s| set.is_multiple_of(s))
    }

    pub fn sampled_sets(&self) -> usize {
        (0..self.sets.len()).filter(|&s| self.is_sampled(s)).count()
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    pub fn get(&self, addr: u64) -> Option<&CacheLine> {
        self.sets[self.set_of(addr)].iter().find(|l| l.addr == addr)
    }

    pub fn contains(&self, addr: u64) -> bool {
        self.get(addr).is_some()
    }

    /// Demand access. A hit refreshes recency and applies `write`.
    pub fn access(&mut self, addr: u64, write: Option<Line>) -> Access {
        let set = self.set_of(addr);
        let sampled = self.is_sampled(set);
        let now = self.tick();
        let Some(l) = self.sets[set].iter_mut().find(|l| l.addr == addr) else {
            return Access::Miss;
        };
        l.lru = now;
        if let Some(d) = write {
            l.data = d;
            l.dirty = true;
        }
        let mut benefit = None;
        if l.prefetched {
            l.prefetched = false;
            if sampled && l.reuse == Some(false) {
                l.reuse = Some(true);
                benefit = l.core_id;
            }
        }
        Access::Hit { benefit }
    }

    pub fn free_ways(&self, set: usize) -> usize {
        self.cfg.assoc - self.sets[set].len()
    }

    /// Least recently used line of `set` not listed in `protect`.
    pub fn lru_victim(&self, set: usize, protect: &[u64]) -> Option<u64> {
        self.sets[set]
            .iter()
            .filter(|l| !protect.contains(&l.addr))
            .min_by_key(|l| l.lru)
            .map(|l| l.addr)
    }

    /// Install a line. Panics if the line is present or its set is full.
    pub fn install(
        &mut self,
        addr: u64,
        data: Line,
        dirty: bool,
        prior: Level,
        prefetched: bool,
        core_id: u8,
    ) {
        let set = self.set_of(addr);
        assert!(self.free_ways(set) > 0, "install into full set {set}");
        assert!(!self.contains(addr), "line {addr:#x} already cached");
        let sampled = self.is_sampled(set);
        let lru = self.tick();
        self.sets[set].push(CacheLine {
            addr,
            data,
            dirty,
            prior,
            prefetched,
            reuse: sampled.then_some(false),
            core_id: sampled.then_some(core_id),
            lru,
        });
    }

    pub fn remove(&mut self, addr: u64) -> Option<CacheLine> {
        let set = self.set_of(addr);
        let pos = self.sets[set].iter().position(|l| l.addr == addr)?;
        Some(self.sets[set].swap_remove(pos))
    }

    /// Remove `victim` together with every cached line of its packed unit.
    /// Results are in group order.
    pub fn ganged_evict(&mut self, victim: u64) -> Vec<CacheLine> {
        let Some(prior) = self.get(victim).map(|l| l.prior) else {
            return Vec::new();
        };
        let base = group_of(victim) * GROUP_LINES;
        let members: Vec<u64> = match prior {
            Level::Uncompressed => vec![victim],
            Level::X2 => {
                let first = base + (index_in_group(victim) & !1) as u64;
                vec![first, first + 1]
            }
            Level::X4 => (base..base + GROUP_LINES).collect(),
        };
        let members: Vec<u64> = members
            .into_iter()
            .filter(|&a| a == victim || self.get(a).is_some_and(|l| l.prior == prior))
            .collect();
        members.into_iter().filter_map(|a| self.remove(a)).collect()
    }

    /// Cached lines of `group`, indexed by position.
    pub fn group_lines(&self, group: u64) -> [Option<&CacheLine>; 4] {
        let base = group * GROUP_LINES;
        std::array::from_fn(|i| self.get(base + i as u64))
    }

    pub fn lines(&self) -> impl Iterator<Item = &CacheLine> {
        self.sets.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Groups with a cached compressed member whose unit is only partly
    /// cached. Empty when ganged eviction is working.
    pub fn partial_units(&self) -> Vec<u64> {
        let mut bad: Vec<u64> = self
            .lines()
            .filter(|l| l.prior != Level::Uncompressed)
            .filter(|l| {
                let lines = self.group_lines(group_of(l.addr));
                let idx = index_in_group(l.addr);
                let unit = match l.prior {
                    Level::X2 => (idx & !1)..(idx & !1) + 2,
                    _ => 0..4,
                };
                unit.into_iter()
                    .any(|i| lines[i].is_none_or(|m| m.prior != l.prior))
            })
            .map(|l| group_of(l.addr))
            .collect();
        bad.sort_unstable();
        bad.dedup();
        bad
    }
}
