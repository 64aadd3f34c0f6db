pub const COUNTER_BITS: u32 = 12;
pub const COUNTER_MAX: u16 = (1 << COUNTER_BITS) - 1;
pub const COUNTER_INIT: u16 = 1 << (COUNTER_BITS - 1);
pub const DEFAULT_CORES: usize = 8;

/// Counter step per event kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostWeights {
    pub clean_writeback: u16,
    pub invalidate: u16,
    pub second_access: u16,
    pub benefit: u16,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights {
            clean_writeback: 1,
            invalidate: 1,
            second_access: 1,
            benefit: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyEvent {
    Cost(u16),
    Benefit(u16),
}

/// Per-core saturating counters; compression is on while the MSB is set.
#[derive(Debug, Clone)]
pub struct DynamicPolicy {
    counters: Vec<u16>,
}

impl DynamicPolicy {
    pub fn new(cores: usize) -> Self {
        DynamicPolicy {
            counters: vec![COUNTER_INIT; cores],
        }
    }

    fn slot(&mut self, core: u8) -> &mut u16 {
        let n = self.counters.len();
        &mut self.counters[core as usize % n]
    }

    pub fn update(&mut self, event: PolicyEvent, core: u8) {
        let c = self.slot(core);
        *c = match event {
            PolicyEvent::Cost(w) => c.saturating_sub(w),
            PolicyEvent::Benefit(w) => c.saturating_add(w).min(COUNTER_MAX),
        };
    }

    pub fn counter(&self, core: u8) -> u16 {
        self.counters[core as usize % self.counters.len()]
    }

    pub fn enabled(&self, core: u8) -> bool {
        self.counter(core) & COUNTER_INIT != 0
    }

    pub fn storage_bytes(&self) -> usize {
        (self.counters.len() * COUNTER_BITS as usize).div_ceil(8)
    }
}
