use std::collections::HashSet;

use super::{Controller, ControllerConfig, Member, Mode, SimError};
use crate::llc::{Access, CacheConfig, Llc};
use crate::{group_of, Line, GROUP_LINES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub mode: Mode,
    pub llc: CacheConfig,
    pub ctrl: ControllerConfig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimStats {
    pub reads: u64,
    pub writes: u64,
    pub hits: u64,
    pub misses: u64,
}

impl SimStats {
    pub fn hit_rate(&self) -> f64 {
        let n = self.hits + self.misses;
        if n == 0 {
            0.0
        } else {
            self.hits as f64 / n as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessReport {
    pub hit: bool,
    /// Line content after the access.
    pub value: Line,
    /// Lines installed from memory by this access, demanded line first.
    pub fills: Vec<(u64, Line)>,
}

/// One mode's LLC plus memory controller.
pub struct Simulator {
    llc: Llc,
    ctrl: Controller,
    touched: HashSet<u64>,
    stats: SimStats,
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Result<Self, SimError> {
        Ok(Simulator {
            llc: Llc::new(cfg.llc)?,
            ctrl: Controller::new(cfg.mode, cfg.ctrl),
            touched: HashSet::new(),
            stats: SimStats::default(),
        })
    }

    pub fn llc(&self) -> &Llc {
        &self.llc
    }

    pub fn controller(&self) -> &Controller {
        &self.ctrl
    }

    pub fn stats(&self) -> &SimStats {
        &self.stats
    }

    /// Apply one LLC request. `data` is the written value for writes and the
    /// initial memory content for a first-touch read; otherwise ignored.
    pub fn access(
        &mut self,
        core: u8,
        write: bool,
        addr: u64,
        data: Option<Line>,
    ) -> Result<AccessReport, SimError> {
        self.ctrl.check_addr(addr)?;
        if self.touched.insert(addr) && !write {
            if let Some(d) = data {
                self.ctrl.preload(addr, d)?;
            }
        }
        if write {
            self.stats.writes += 1;
        } else {
            self.stats.reads += 1;
        }
        let wdata = if write { data } else { None };
        if let Access::Hit { benefit } = self.llc.access(addr, wdata) {
            self.stats.hits += 1;
            if let Some(c) = benefit {
                self.ctrl.benefit(c);
            }
            let value = self.llc.get(addr).expect("hit line present").data;
            return Ok(AccessReport {
                hit: true,
                value,
                fills: Vec::new(),
            });
        }
        self.stats.misses += 1;
        let set = self.llc.set_of(addr);
        let sampled = self.llc.is_sampled(set);
        let rr = self.ctrl.read(addr, core, sampled)?;
        let fills: Vec<(u64, Line)> = rr
            .lines
            .into_iter()
            .filter(|&(a, _)| a == addr || !self.llc.contains(a))
            .collect();
        let protect: Vec<u64> = fills.iter().map(|&(a, _)| a).collect();
        while self.llc.free_ways(set) < fills.len() {
            let victim = self
                .llc
                .lru_victim(set, &protect)
                .ok_or_else(|| super::integrity(addr, "no evictable line in set"))?;
            self.evict_unit(victim, core)?;
        }
        for &(a, d) in &fills {
            self.llc.install(a, d, false, rr.level, a != addr, core);
        }
        if let Some(d) = wdata {
            self.llc.access(addr, Some(d));
        }
        let value = self.llc.get(addr).expect("filled line present").data;
        Ok(AccessReport {
            hit: false,
            value,
            fills,
        })
    }

    fn evict_unit(&mut self, victim: u64, core: u8) -> Result<(), SimError> {
        let set = self.llc.set_of(victim);
        let sampled = self.llc.is_sampled(set);
        let group = group_of(victim);
        let base = group * GROUP_LINES;
        let gone = self.llc.ganged_evict(victim);
        let owner = gone.first().and_then(|l| l.core_id).unwrap_or(core);
        let mut members: [Option<Member>; 4] = [None; 4];
        for l in &gone {
            members[(l.addr - base) as usize] = Some(Member {
                data: l.data,
                dirty: l.dirty,
                evicted: true,
            });
        }
        for (i, m) in members.iter_mut().enumerate() {
            if m.is_none() {
                *m = self.llc.get(base + i as u64).map(|l| Member {
                    data: l.data,
                    dirty: l.dirty,
                    evicted: false,
                });
            }
        }
        let compress = self.ctrl.compress_enabled(sampled, core);
        let written = self
            .ctrl
            .writeback(group, &members, owner, sampled, compress)?;
        for i in 0..4 {
            if written[i] && members[i].is_some_and(|m| !m.evicted) {
                self.llc.remove(base + i as u64);
            }
        }
        Ok(())
    }

    /// Evict every cached line, least recently used first within each set.
    pub fn flush(&mut self) -> Result<(), SimError> {
        for set in 0..self.llc.num_sets() {
            while let Some(v) = self.llc.lru_victim(set, &[]) {
                self.evict_unit(v, 0)?;
            }
        }
        Ok(())
    }
}
