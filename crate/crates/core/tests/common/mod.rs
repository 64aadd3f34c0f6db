//! Ground-truth model used only by tests: a plain logical memory replayed
//! alongside a simulator.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use cram_core::controller::{SimError, Simulator};
use cram_core::harness::TraceRecord;
use cram_core::{group_of, index_in_group, Line, GROUP_LINES};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Default)]
pub struct Shadow {
    mem: HashMap<u64, Line>,
    touched: HashSet<u64>,
    pub checked_values: u64,
}

impl Shadow {
    pub fn value(&self, addr: u64) -> Line {
        self.mem.get(&addr).copied().unwrap_or_default()
    }

    /// Apply one request to both models and compare every delivered line.
    pub fn step(
        &mut self,
        sim: &mut Simulator,
        core: u8,
        write: bool,
        addr: u64,
        data: Option<Line>,
    ) -> Result<(), String> {
        if self.touched.insert(addr) && !write {
            if let Some(d) = data {
                self.mem.insert(addr, d);
            }
        }
        let rep = sim
            .access(core, write, addr, data)
            .map_err(|e: SimError| format!("access {addr:#x}: {e}"))?;
        for &(a, l) in &rep.fills {
            if l != self.value(a) {
                return Err(format!("fill of line {a:#x} differs from ground truth"));
            }
            self.checked_values += 1;
        }
        if write {
            self.mem.insert(addr, data.expect("write carries data"));
        }
        if rep.value != self.value(addr) {
            return Err(format!("value of line {addr:#x} differs from ground truth"));
        }
        self.checked_values += 1;
        Ok(())
    }

    pub fn replay(&mut self, sim: &mut Simulator, trace: &[TraceRecord]) -> Result<(), String> {
        trace
            .iter()
            .try_for_each(|r| self.step(sim, r.core, r.write, r.line_addr(), r.data))
    }

    /// Cached lines carry the level their group really stores them at, no
    /// packed unit is partly cached, and memory decodes to ground truth for
    /// every line not held in the LLC.
    pub fn audit(&self, sim: &Simulator) -> Result<(), String> {
        let llc = sim.llc();
        let ctrl = sim.controller();
        let mem = ctrl.memory();
        for l in llc.lines() {
            let truth = mem.state(group_of(l.addr)).level_of(index_in_group(l.addr));
            if l.prior != truth {
                return Err(format!(
                    "line {:#x} cached as {:?}, stored as {truth:?}",
                    l.addr, l.prior
                ));
            }
        }
        let partial = llc.partial_units();
        if !partial.is_empty() {
            return Err(format!("partly cached packed groups: {partial:?}"));
        }
        let groups: HashSet<u64> = self.touched.iter().map(|&a| group_of(a)).collect();
        for g in groups {
            let lines = ctrl.decode_group(g).map_err(|e| e.to_string())?;
            for (i, l) in lines.iter().enumerate() {
                let a = g * GROUP_LINES + i as u64;
                let cached = llc.get(a);
                if cached.is_some_and(|c| c.dirty) {
                    continue;
                }
                if *l != self.value(a) {
                    return Err(format!("memory holds a stale value for line {a:#x}"));
                }
                if let Some(c) = cached {
                    if c.data != self.value(a) {
                        return Err(format!(
                            "clean cached line {a:#x} differs from ground truth"
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Data whose tail equals `tail` and whose body is random.
pub fn with_tail(rng: &mut impl RngCore, tail: u32) -> Line {
    let mut b = [0u8; 64];
    rng.fill_bytes(&mut b);
    b[60..].copy_from_slice(&tail.to_le_bytes());
    Line(b)
}

/// Random line drawn from a mix of compressibility classes.
pub fn mixed_line(rng: &mut ChaCha8Rng) -> Line {
    match rng.random_range(0..10) {
        0..=1 => Line::zero(),
        2..=4 => {
            let w: [u32; 16] = std::array::from_fn(|_| rng.random_range(-8i32..=7) as u32);
            Line::from_words(&w)
        }
        5..=6 => {
            let w: [u32; 16] = std::array::from_fn(|_| rng.random_range(-128i32..=127) as u32);
            Line::from_words(&w)
        }
        7 => with_tail(rng, 0x2222_2222),
        8 => with_tail(rng, 0x4444_4444),
        _ => {
            let mut b = [0u8; 64];
            rng.fill_bytes(&mut b);
            Line(b)
        }
    }
}

/// Random requests with locality: a few hundred hot groups scattered over
/// `memory_lines`, reads and writes from four cores.
pub fn random_trace(seed: u64, ops: usize, memory_lines: u64, hot_groups: u64) -> Vec<TraceRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups: Vec<u64> = (0..hot_groups)
        .map(|_| rng.random_range(0..memory_lines / GROUP_LINES))
        .collect();
    let mut out = Vec::with_capacity(ops);
    for seq in 0..ops {
        let g = groups[rng.random_range(0..groups.len())];
        let line = g * GROUP_LINES + rng.random_range(0..GROUP_LINES);
        let write = rng.random_bool(0.3);
        let data = if write || rng.random_bool(0.5) {
            Some(mixed_line(&mut rng))
        } else {
            None
        };
        out.push(TraceRecord {
            seq: seq as u64,
            core: rng.random_range(0..4),
            write,
            addr: line * 64,
            data,
        });
    }
    out
}
