//! Memory controller: read and writeback paths for every mode, the bandwidth
//! ledger and the compression on/off policy.

mod dynamic;
mod ledger;
mod memory;
mod metadata;
mod sim;

pub use dynamic::{
    CostWeights, DynamicPolicy, PolicyEvent, COUNTER_INIT, COUNTER_MAX, DEFAULT_CORES,
};
pub use ledger::BandwidthLedger;
pub use memory::{Memory, DEFAULT_MEMORY_LINES};
pub use metadata::{
    MetaAccess, MetadataCache, DEFAULT_METADATA_ASSOC, DEFAULT_METADATA_CACHE_BYTES,
    GROUPS_PER_BLOCK,
};
pub use sim::{AccessReport, SimConfig, SimStats, Simulator};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::codec::{pack_group, unpack_group, CodecError, PackLevel, PackedPayload, PAYLOAD_BYTES};
use crate::layout::{
    candidate_slots, probe_order, slot_of, GroupState, LayoutError, Level, SlotContent,
};
use crate::llc::LlcError;
use crate::marker::{
    classify, prepare_uncompressed_write, Classification, Lit, LitDelta, LitEffect, LitOverflow,
    MarkerConfig, MarkerGen, MarkerMode, LIT_ENTRIES,
};
use crate::predictor::{Lct, LctConfig, LlpStats};
use crate::{index_in_group, Line, GROUP_LINES};

/// Consecutive failed re-keys before giving up.
const MAX_REKEY_ATTEMPTS: u32 = 64;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("line {addr:#x} outside memory of {capacity} lines")]
    AddressOutOfRange { addr: u64, capacity: u64 },
    #[error("integrity fault at line {addr:#x}: {detail}")]
    Integrity { addr: u64, detail: String },
    #[error("no marker key avoided a table overflow after {0} attempts")]
    RekeyFailed(u32),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Llc(#[from] LlcError),
}

fn integrity(addr: u64, detail: impl Into<String>) -> SimError {
    SimError::Integrity {
        addr,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Uncompressed,
    Explicit,
    CramStatic,
    CramDynamic,
    Ideal,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Uncompressed,
        Mode::Explicit,
        Mode::CramStatic,
        Mode::CramDynamic,
        Mode::Ideal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Uncompressed => "uncompressed",
            Mode::Explicit => "explicit",
            Mode::CramStatic => "cram-static",
            Mode::CramDynamic => "cram-dynamic",
            Mode::Ideal => "ideal",
        }
    }

    /// Compression status is found from markers in the data itself.
    pub fn implicit(self) -> bool {
        matches!(self, Mode::CramStatic | Mode::CramDynamic)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub memory_lines: u64,
    pub markers: MarkerConfig,
    pub lit_entries: usize,
    pub lit_overflow: LitOverflow,
    pub lct: LctConfig,
    pub weights: CostWeights,
    pub cores: usize,
    pub metadata_cache_bytes: usize,
    pub metadata_assoc: usize,
    pub seed: u64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            memory_lines: DEFAULT_MEMORY_LINES,
            markers: MarkerConfig::default(),
            lit_entries: LIT_ENTRIES,
            lit_overflow: LitOverflow::Rekey,
            lct: LctConfig::default(),
            weights: CostWeights::default(),
            cores: DEFAULT_CORES,
            metadata_cache_bytes: DEFAULT_METADATA_CACHE_BYTES,
            metadata_assoc: DEFAULT_METADATA_ASSOC,
            seed: 0,
        }
    }
}

/// Outcome of servicing an LLC miss.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadResult {
    /// Level the demanded line was stored at.
    pub level: Level,
    /// Demanded line first, then the other lines of its packed unit.
    pub lines: Vec<(u64, Line)>,
}

/// A group member offered to the writeback path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Member {
    pub data: Line,
    pub dirty: bool,
    /// Leaving the LLC; otherwise a cached neighbour that may be pulled in.
    pub evicted: bool,
}

/// On-chip bytes by structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StorageAudit {
    pub markers: usize,
    pub marker_il: usize,
    pub lit: usize,
    pub llp: usize,
    pub dynamic_counters: usize,
}

impl StorageAudit {
    pub fn total(&self) -> usize {
        self.markers + self.marker_il + self.lit + self.llp + self.dynamic_counters
    }
}

pub struct Controller {
    mode: Mode,
    cfg: ControllerConfig,
    mem: Memory,
    gen: MarkerGen,
    lit: Lit,
    rng: ChaCha8Rng,
    lct: Lct,
    llp: LlpStats,
    policy: DynamicPolicy,
    meta: MetadataCache,
    ledger: BandwidthLedger,
    inverted_writes: u64,
}

impl Controller {
    pub fn new(mode: Mode, cfg: ControllerConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let key: u128 = rng.random();
        Controller {
            mode,
            cfg,
            mem: Memory::new(cfg.memory_lines),
            gen: MarkerGen::new(key, cfg.markers),
            lit: Lit::new(cfg.lit_entries, cfg.lit_overflow),
            rng,
            lct: Lct::new(cfg.lct),
            llp: LlpStats::default(),
            policy: DynamicPolicy::new(cfg.cores),
            meta: MetadataCache::new(cfg.metadata_cache_bytes, cfg.metadata_assoc),
            ledger: BandwidthLedger::default(),
            inverted_writes: 0,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn ledger(&self) -> &BandwidthLedger {
        &self.ledger
    }

    /// Uncompressed slot writes stored inverted.
    pub fn inverted_writes(&self) -> u64 {
        self.inverted_writes
    }

    pub fn llp_stats(&self) -> &LlpStats {
        &self.llp
    }

    pub fn policy(&self) -> &DynamicPolicy {
        &self.policy
    }

    pub fn lit(&self) -> &Lit {
        &self.lit
    }

    pub fn memory(&self) -> &Memory {
        &self.mem
    }

    pub fn markers(&self) -> &MarkerGen {
        &self.gen
    }

    pub fn check_addr(&self, addr: u64) -> Result<(), SimError> {
        if addr >= self.mem.capacity() {
            return Err(SimError::AddressOutOfRange {
                addr,
                capacity: self.mem.capacity(),
            });
        }
        Ok(())
    }

    pub fn storage_audit(&self) -> StorageAudit {
        StorageAudit {
            markers: 2 * 4,
            marker_il: 64,
            lit: self.lit.storage_bytes(),
            llp: self.lct.storage_bytes(),
            dynamic_counters: self.policy.storage_bytes(),
        }
    }

    /// Whether a writeback from this set may compress.
    pub fn compress_enabled(&self, sampled: bool, core: u8) -> bool {
        match self.mode {
            Mode::Uncompressed => false,
            Mode::CramDynamic => sampled || self.policy.enabled(core),
            _ => true,
        }
    }

    fn cost(&mut self, sampled: bool, core: u8, weight: u16) {
        if sampled && self.mode == Mode::CramDynamic {
            self.policy.update(PolicyEvent::Cost(weight), core);
        }
    }

    /// A prefetched line in a sampled set was demanded.
    pub fn benefit(&mut self, core: u8) {
        if self.mode == Mode::CramDynamic {
            self.policy
                .update(PolicyEvent::Benefit(self.cfg.weights.benefit), core);
        }
    }

    fn meta_access(&mut self, group: u64, make_dirty: bool) {
        let a = self.meta.access(group, make_dirty);
        self.ledger.metadata_reads += a.miss as u64;
        self.ledger.metadata_writes += a.dirty_eviction as u64;
    }

    // ---- slot stores ----

    fn lit_effect(&mut self, effect: LitEffect, charge: bool) {
        if effect == LitEffect::BitmapWrite && charge {
            self.ledger.lit_bitmap_accesses += 1;
        }
    }

    fn store_uncompressed(
        &mut self,
        slot_addr: u64,
        data: Line,
        charge: bool,
    ) -> Result<(), SimError> {
        if !self.mode.implicit() {
            self.mem.write(slot_addr, data);
            return Ok(());
        }
        loop {
            let ms = self.gen.markers(slot_addr);
            let (raw, delta) = prepare_uncompressed_write(slot_addr, &data, &ms, &self.lit);
            match self.lit.apply(delta) {
                LitEffect::RekeyRequired => self.rekey(Some((slot_addr, data)))?,
                e => {
                    self.inverted_writes += matches!(delta, LitDelta::Insert(_)) as u64;
                    self.lit_effect(e, charge);
                    self.mem.write(slot_addr, raw);
                    return Ok(());
                }
            }
        }
    }

    fn store_marked(&mut self, slot_addr: u64, raw: Line) {
        let e = self.lit.apply(LitDelta::Remove(slot_addr));
        self.lit_effect(e, true);
        self.mem.write(slot_addr, raw);
    }

    fn store_packed(&mut self, slot_addr: u64, p: &PackedPayload) {
        if self.mode.implicit() {
            let raw = self.gen.markers(slot_addr).seal(p);
            self.store_marked(slot_addr, raw);
        } else {
            let mut b = [0u8; 64];
            b[..PAYLOAD_BYTES].copy_from_slice(&p.to_bytes());
            self.mem.write(slot_addr, Line(b));
        }
    }

    fn store_invalid(&mut self, slot_addr: u64) {
        let il = self.gen.markers(slot_addr).il;
        self.store_marked(slot_addr, il);
    }

    /// Draw keys until every written slot, plus the pending uncompressed
    /// write, re-encodes without overflowing the LIT, then rewrite memory
    /// under the new key. The pending write itself is left to the caller.
    fn rekey(&mut self, pending: Option<(u64, Line)>) -> Result<(), SimError> {
        let mut decoded: Vec<(u64, Classification)> = self
            .mem
            .written_slots()
            .into_iter()
            .filter(|&a| pending.is_none_or(|(p, _)| p != a))
            .map(|a| {
                let ms = self.gen.markers(a);
                (a, classify(a, &self.mem.read(a), &ms, &self.lit).kind)
            })
            .collect();
        let pending_idx = pending.map(|(a, d)| {
            decoded.push((a, Classification::Uncompressed(d)));
            decoded.len() - 1
        });
        for _ in 0..MAX_REKEY_ATTEMPTS {
            self.ledger.rekey_events += 1;
            let gen = MarkerGen::new(self.rng.random(), self.cfg.markers);
            let mut lit = Lit::new(self.cfg.lit_entries, self.cfg.lit_overflow);
            let mut images = Vec::with_capacity(decoded.len());
            let mut ok = true;
            for &(a, ref kind) in &decoded {
                let ms = gen.markers(a);
                let raw = match kind {
                    Classification::InvalidSlot => ms.il,
                    Classification::CompressedX2(p) | Classification::CompressedX4(p) => {
                        let level = match kind {
                            Classification::CompressedX2(_) => PackLevel::X2,
                            _ => PackLevel::X4,
                        };
                        let mut b = [0u8; 64];
                        b[..PAYLOAD_BYTES].copy_from_slice(p);
                        b[PAYLOAD_BYTES..].copy_from_slice(&ms.marker(level).to_le_bytes());
                        Line(b)
                    }
                    Classification::Uncompressed(d) => {
                        let (raw, delta) = prepare_uncompressed_write(a, d, &ms, &lit);
                        if lit.apply(delta) == LitEffect::RekeyRequired {
                            ok = false;
                            break;
                        }
                        raw
                    }
                };
                images.push((a, raw));
            }
            if ok {
                if let Some(i) = pending_idx {
                    images.swap_remove(i);
                }
                for (a, raw) in images {
                    self.mem.write(a, raw);
                }
                self.gen = gen;
                self.lit = lit;
                return Ok(());
            }
        }
        Err(SimError::RekeyFailed(MAX_REKEY_ATTEMPTS))
    }

    /// Set the initial content of a line that has never been accessed.
    /// Not charged to the ledger.
    pub fn preload(&mut self, addr: u64, data: Line) -> Result<(), SimError> {
        self.check_addr(addr)?;
        let state = self.mem.state(addr / GROUP_LINES);
        let idx = index_in_group(addr);
        if state.level_of(idx) != Level::Uncompressed {
            return Err(integrity(addr, format!("preload into {state:?} group")));
        }
        self.store_uncompressed(addr, data, false)
    }

    // ---- read path ----

    fn decode_unit(
        &self,
        base: u64,
        state: GroupState,
        slot: usize,
        raw: &Line,
    ) -> Result<Vec<(u64, Line)>, SimError> {
        match state.slot_content(slot) {
            SlotContent::Uncompressed(i) => Ok(vec![(base + i as u64, *raw)]),
            SlotContent::Packed { level, first } => {
                let bytes: [u8; PAYLOAD_BYTES] = raw.0[..PAYLOAD_BYTES].try_into().unwrap();
                let lines = unpack_group(&PackedPayload::parse(level, &bytes)?)?;
                Ok(lines
                    .into_iter()
                    .enumerate()
                    .map(|(j, l)| (base + (first + j) as u64, l))
                    .collect())
            }
            SlotContent::Invalid => Err(integrity(base + slot as u64, "read of a vacated slot")),
        }
    }

    fn demanded_first(addr: u64, mut lines: Vec<(u64, Line)>) -> Vec<(u64, Line)> {
        if let Some(p) = lines.iter().position(|&(a, _)| a == addr) {
            lines.swap(0, p);
        }
        lines
    }

    /// Service an LLC miss for `addr`.
    pub fn read(&mut self, addr: u64, core: u8, sampled: bool) -> Result<ReadResult, SimError> {
        self.check_addr(addr)?;
        let group = addr / GROUP_LINES;
        let base = group * GROUP_LINES;
        let idx = index_in_group(addr);
        let state = self.mem.state(group);
        match self.mode {
            Mode::Uncompressed => {
                self.ledger.demand_data += 1;
                Ok(ReadResult {
                    level: Level::Uncompressed,
                    lines: vec![(addr, self.mem.read(addr))],
                })
            }
            Mode::Explicit | Mode::Ideal => {
                if self.mode == Mode::Explicit {
                    self.meta_access(group, false);
                }
                self.ledger.demand_data += 1;
                let slot = slot_of(idx, state);
                let raw = self.mem.read(base + slot as u64);
                let lines = self.decode_unit(base, state, slot, &raw)?;
                Ok(ReadResult {
                    level: state.level_of(idx),
                    lines: Self::demanded_first(addr, lines),
                })
            }
            Mode::CramStatic | Mode::CramDynamic => self.read_implicit(addr, core, sampled, state),
        }
    }

    fn read_implicit(
        &mut self,
        addr: u64,
        core: u8,
        sampled: bool,
        truth: GroupState,
    ) -> Result<ReadResult, SimError> {
        let base = addr / GROUP_LINES * GROUP_LINES;
        let idx = index_in_group(addr);
        let predicted = self.lct.predict(addr);
        let needs_prediction = candidate_slots(idx).len() > 1;
        let order = if needs_prediction {
            probe_order(idx, predicted)
        } else {
            candidate_slots(idx).to_vec()
        };
        for (k, &slot) in order.iter().enumerate() {
            if k == 0 {
                self.ledger.demand_data += 1;
            } else {
                self.ledger.second_access += 1;
                self.cost(sampled, core, self.cfg.weights.second_access);
            }
            let slot_addr = base + slot as u64;
            let ms = self.gen.markers(slot_addr);
            let c = classify(slot_addr, &self.mem.read(slot_addr), &ms, &self.lit);
            self.ledger.lit_bitmap_accesses += c.bitmap_access as u64;
            let (level, first, bytes) = match c.kind {
                Classification::Uncompressed(d) if slot == idx => {
                    self.resolve(
                        addr,
                        predicted,
                        needs_prediction,
                        k,
                        Level::Uncompressed,
                        truth,
                    )?;
                    return Ok(ReadResult {
                        level: Level::Uncompressed,
                        lines: vec![(addr, d)],
                    });
                }
                Classification::Uncompressed(_) | Classification::InvalidSlot => continue,
                Classification::CompressedX2(b) if slot == idx & !1 => (PackLevel::X2, slot, b),
                Classification::CompressedX2(_) => continue,
                Classification::CompressedX4(b) if slot == 0 => (PackLevel::X4, 0, b),
                Classification::CompressedX4(_) => {
                    return Err(integrity(slot_addr, "4:1 marker outside slot 0"));
                }
            };
            let lines = unpack_group(&PackedPayload::parse(level, &bytes)?)?;
            let level = Level::from_pack(level);
            self.resolve(addr, predicted, needs_prediction, k, level, truth)?;
            let lines = lines
                .into_iter()
                .enumerate()
                .map(|(j, l)| (base + (first + j) as u64, l))
                .collect();
            return Ok(ReadResult {
                level,
                lines: Self::demanded_first(addr, lines),
            });
        }
        Err(integrity(addr, "no candidate slot holds the line"))
    }

    fn resolve(
        &mut self,
        addr: u64,
        predicted: Level,
        needs_prediction: bool,
        probe: usize,
        observed: Level,
        truth: GroupState,
    ) -> Result<(), SimError> {
        let expected = truth.level_of(index_in_group(addr));
        if observed != expected {
            return Err(integrity(
                addr,
                format!("memory says {observed:?}, layout says {expected:?}"),
            ));
        }
        if needs_prediction {
            self.llp.record(probe == 0);
        }
        self.lct.update(addr, predicted, observed);
        Ok(())
    }

    // ---- writeback path ----

    fn next_state(
        &self,
        group: u64,
        old: GroupState,
        m: &[Option<Member>; 4],
        compress: bool,
    ) -> Result<GroupState, SimError> {
        let lines: [Option<Line>; 4] = m.map(|x| x.map(|x| x.data));
        let evicted = |i: usize| m[i].is_some_and(|x| x.evicted);
        let fits = |first: usize, level: PackLevel| -> Result<bool, SimError> {
            let unit: Option<Vec<Line>> =
                (first..first + level.lines()).map(|i| lines[i]).collect();
            Ok(match unit {
                Some(u) => pack_group(&u, level)?.is_some(),
                None => false,
            })
        };
        let base = group * GROUP_LINES;
        // Packed units leave the LLC together.
        for (slot, c) in old.slots().into_iter().enumerate() {
            if let SlotContent::Packed { level, first } = c {
                let n = (first..first + level.lines())
                    .filter(|&i| evicted(i))
                    .count();
                if n != 0 && n != level.lines() {
                    return Err(integrity(base + slot as u64, "packed unit partly evicted"));
                }
            }
        }
        let old_pair = [
            matches!(old, GroupState::P01 | GroupState::P01P23),
            matches!(old, GroupState::P23 | GroupState::P01P23),
        ];
        let touched = |p: usize| evicted(2 * p) || evicted(2 * p + 1);
        if compress {
            if (old == GroupState::Q || (0..4).all(|i| lines[i].is_some()))
                && fits(0, PackLevel::X4)?
            {
                return Ok(GroupState::Q);
            }
            let pair = |p: usize| -> Result<bool, SimError> {
                if touched(p) {
                    fits(2 * p, PackLevel::X2)
                } else {
                    Ok(old_pair[p])
                }
            };
            Ok(GroupState::from_pairs(pair(0)?, pair(1)?))
        } else {
            if old == GroupState::Q {
                return Ok(if fits(0, PackLevel::X4)? {
                    GroupState::Q
                } else {
                    GroupState::U
                });
            }
            let pair = |p: usize| -> Result<bool, SimError> {
                if touched(p) && old_pair[p] {
                    fits(2 * p, PackLevel::X2)
                } else {
                    Ok(old_pair[p])
                }
            };
            Ok(GroupState::from_pairs(pair(0)?, pair(1)?))
        }
    }

    /// Write back evicted lines of `group`, possibly packing them with cached
    /// neighbours. Returns which members were written; written neighbours
    /// must leave the LLC.
    pub fn writeback(
        &mut self,
        group: u64,
        members: &[Option<Member>; 4],
        core: u8,
        sampled: bool,
        compress: bool,
    ) -> Result<[bool; 4], SimError> {
        let base = group * GROUP_LINES;
        self.check_addr(base)?;
        let mut written = [false; 4];
        if self.mode == Mode::Uncompressed {
            for (i, m) in members.iter().enumerate() {
                if let Some(m) = m.filter(|m| m.evicted && m.dirty) {
                    self.mem.write(base + i as u64, m.data);
                    self.ledger.dirty_writebacks += 1;
                    written[i] = true;
                }
            }
            return Ok(written);
        }
        let old = self.mem.state(group);
        let new = self.next_state(group, old, members, compress)?;
        let w = self.cfg.weights;
        let charge_clean = self.mode != Mode::Ideal;
        for slot in 0..4 {
            let slot_addr = base + slot as u64;
            let oc = old.slot_content(slot);
            let nc = new.slot_content(slot);
            match nc {
                SlotContent::Invalid => {
                    if oc != SlotContent::Invalid && self.mode.implicit() {
                        self.store_invalid(slot_addr);
                        self.ledger.invalidates += 1;
                        self.cost(sampled, core, w.invalidate);
                    }
                }
                SlotContent::Packed { level, first } => {
                    let unit = first..first + level.lines();
                    let dirty = unit.clone().any(|i| members[i].is_some_and(|m| m.dirty));
                    let touched = unit.clone().any(|i| members[i].is_some_and(|m| m.evicted));
                    // An unchanged unit is rewritten only when it leaves dirty.
                    if oc == nc && !(touched && dirty) {
                        continue;
                    }
                    let lines = unit
                        .clone()
                        .map(|i| {
                            members[i].map(|m| m.data).ok_or_else(|| {
                                integrity(base + i as u64, "packed line unavailable")
                            })
                        })
                        .collect::<Result<Vec<Line>, _>>()?;
                    let p = pack_group(&lines, level)?
                        .ok_or_else(|| integrity(slot_addr, "chosen packing does not fit"))?;
                    self.store_packed(slot_addr, &p);
                    unit.for_each(|i| written[i] = true);
                    if dirty {
                        self.ledger.dirty_writebacks += 1;
                    } else if charge_clean {
                        self.ledger.clean_writebacks += 1;
                        self.cost(sampled, core, w.clean_writeback);
                    }
                }
                SlotContent::Uncompressed(i) => {
                    if oc == nc {
                        if let Some(m) = members[i].filter(|m| m.evicted && m.dirty) {
                            self.store_uncompressed(slot_addr, m.data, true)?;
                            self.ledger.dirty_writebacks += 1;
                            written[i] = true;
                        }
                        continue;
                    }
                    // Relocation out of a packed unit.
                    let m = members[i]
                        .ok_or_else(|| integrity(slot_addr, "relocated line unavailable"))?;
                    self.store_uncompressed(slot_addr, m.data, true)?;
                    written[i] = true;
                    if m.dirty {
                        self.ledger.dirty_writebacks += 1;
                    } else if charge_clean {
                        self.ledger.clean_writebacks += 1;
                        self.cost(sampled, core, w.clean_writeback);
                    }
                }
            }
        }
        if new != old {
            if self.mode == Mode::Explicit {
                self.meta_access(group, true);
            }
            self.mem.set_state(group, new);
        }
        Ok(written)
    }

    /// Logical contents of a group decoded from memory under its true layout.
    pub fn decode_group(&self, group: u64) -> Result<[Line; 4], SimError> {
        let base = group * GROUP_LINES;
        let state = self.mem.state(group);
        let mut out = [Line::zero(); 4];
        for slot in 0..4 {
            let slot_addr = base + slot as u64;
            let stored = self.mem.read(slot_addr);
            let raw = match state.slot_content(slot) {
                SlotContent::Invalid => {
                    if self.mode.implicit() && stored != self.gen.markers(slot_addr).il {
                        return Err(integrity(slot_addr, "vacated slot lacks the invalid image"));
                    }
                    continue;
                }
                SlotContent::Uncompressed(_)
                    if self.mode.implicit() && self.lit.contains(slot_addr) =>
                {
                    stored.inverted()
                }
                _ => stored,
            };
            for (a, l) in self.decode_unit(base, state, slot, &raw)? {
                out[(a - base) as usize] = l;
            }
        }
        Ok(out)
    }

    pub fn marker_mode(&self) -> MarkerMode {
        self.cfg.markers.mode
    }
}
