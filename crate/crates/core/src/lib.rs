//! Trace-driven simulator of a hardware-managed compressed main memory.
//!
//! Adjacent 64-byte lines are packed 2:1 or 4:1 into a single memory slot.
//! A packed slot is recognised on read by a per-line marker in its last four
//! bytes, so no metadata lookup is needed; a small location predictor picks
//! which slot to probe first, and a set-sampling policy turns compression off
//! when it costs more bandwidth than it saves.
//!
//! Layout of the crate:
//!
//! * [`codec`]: FPC/BDI line compression and 60-byte group packing.
//! * [`marker`]: marker generation, slot classification, line inversion.
//! * [`layout`]: the five legal placements of a four-line group.
//! * [`llc`]: last-level cache with ganged eviction and sampled sets.
//! * [`predictor`]: last-compressibility line location predictor.
//! * [`controller`]: memory controller modes and the bandwidth ledger.
//! * [`harness`]: traces, workload generators, config and reports.

pub mod codec;
pub mod controller;
pub mod harness;
pub mod layout;
pub mod llc;
pub mod marker;
pub mod predictor;

pub use codec::Line;

/// Lines per compression group.
pub const GROUP_LINES: u64 = 4;

#[inline]
pub fn group_of(line_addr: u64) -> u64 {
    line_addr / GROUP_LINES
}

/// Position of a line inside its group (0..=3).
#[inline]
pub fn index_in_group(line_addr: u64) -> usize {
    (line_addr % GROUP_LINES) as usize
}
