//! Placement of a four-line group across its four memory slots.
//!
//! Pairs are always (0,1) and (2,3). A packed pair lives in the slot of its
//! first line, a 4:1 group lives in slot 0, and slots vacated by packing hold
//! the invalid-line marker. Line 0 therefore never moves.

use crate::codec::{pack_group, Line, PackLevel, PackedPayload};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("state {state:?} needs line {line} for slot {slot}")]
    MissingLine {
        state: GroupState,
        slot: usize,
        line: usize,
    },
    #[error("lines for slot {slot} do not fit a {level:?} payload under {state:?}")]
    DoesNotFit {
        state: GroupState,
        slot: usize,
        level: PackLevel,
    },
    #[error("invalid CSI encoding {0}")]
    BadCsi(u8),
}

/// Compression level a line was stored at. Two bits in hardware.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub enum Level {
    #[default]
    Uncompressed = 0,
    X2 = 1,
    X4 = 2,
}

impl Level {
    pub fn pack_level(self) -> Option<PackLevel> {
        match self {
            Level::Uncompressed => None,
            Level::X2 => Some(PackLevel::X2),
            Level::X4 => Some(PackLevel::X4),
        }
    }

    pub fn from_pack(p: PackLevel) -> Self {
        match p {
            PackLevel::X2 => Level::X2,
            PackLevel::X4 => Level::X4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::Uncompressed => "uncomp",
            Level::X2 => "x2",
            Level::X4 => "x4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GroupState {
    /// All four lines uncompressed in their own slots.
    #[default]
    U,
    /// Lines 0,1 packed in slot 0.
    P01,
    /// Lines 2,3 packed in slot 2.
    P23,
    P01P23,
    /// All four lines packed in slot 0.
    Q,
}

/// What a slot holds under a given group state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotContent {
    Uncompressed(usize),
    /// Packed unit starting at line `first` (0 or 2 for pairs, 0 for quads).
    Packed {
        level: PackLevel,
        first: usize,
    },
    Invalid,
}

impl SlotContent {
    pub fn contains(self, line_idx: usize) -> bool {
        match self {
            SlotContent::Uncompressed(i) => i == line_idx,
            SlotContent::Packed { level, first } => {
                (first..first + level.lines()).contains(&line_idx)
            }
            SlotContent::Invalid => false,
        }
    }
}

impl GroupState {
    pub const ALL: [GroupState; 5] = [
        GroupState::U,
        GroupState::P01,
        GroupState::P23,
        GroupState::P01P23,
        GroupState::Q,
    ];

    /// 3-bit CSI used by the explicit-metadata baseline.
    pub fn csi(self) -> u8 {
        match self {
            GroupState::U => 0,
            GroupState::P01 => 1,
            GroupState::P23 => 2,
            GroupState::P01P23 => 3,
            GroupState::Q => 4,
        }
    }

    pub fn from_csi(csi: u8) -> Result<Self, LayoutError> {
        GroupState::ALL
            .get(csi as usize)
            .copied()
            .ok_or(LayoutError::BadCsi(csi))
    }

    pub fn from_pairs(pair01: bool, pair23: bool) -> Self {
        match (pair01, pair23) {
            (false, false) => GroupState::U,
            (true, false) => GroupState::P01,
            (false, true) => GroupState::P23,
            (true, true) => GroupState::P01P23,
        }
    }

    /// Level at which line `idx` is stored.
    pub fn level_of(self, idx: usize) -> Level {
        match (self, idx) {
            (GroupState::Q, _) => Level::X4,
            (GroupState::P01 | GroupState::P01P23, 0 | 1) => Level::X2,
            (GroupState::P23 | GroupState::P01P23, 2 | 3) => Level::X2,
            _ => Level::Uncompressed,
        }
    }

    pub fn slot_content(self, slot: usize) -> SlotContent {
        use GroupState::*;
        let pair = |first| SlotContent::Packed {
            level: PackLevel::X2,
            first,
        };
        match (self, slot) {
            (Q, 0) => SlotContent::Packed {
                level: PackLevel::X4,
                first: 0,
            },
            (Q, _) => SlotContent::Invalid,
            (P01 | P01P23, 0) => pair(0),
            (P01 | P01P23, 1) => SlotContent::Invalid,
            (P23 | P01P23, 2) => pair(2),
            (P23 | P01P23, 3) => SlotContent::Invalid,
            (_, s) => SlotContent::Uncompressed(s),
        }
    }

    pub fn slots(self) -> [SlotContent; 4] {
        std::array::from_fn(|s| self.slot_content(s))
    }
}

/// Slot holding line `idx` when the group is in `state`.
pub fn slot_of(idx: usize, state: GroupState) -> usize {
    slot_for_level(idx, state.level_of(idx))
}

/// Slot holding line `idx` if it is stored at `level`.
pub fn slot_for_level(idx: usize, level: Level) -> usize {
    match level {
        Level::Uncompressed => idx,
        Level::X2 => idx & !1,
        Level::X4 => 0,
    }
}

/// Every slot that can hold line `idx`, in re-issue order.
pub fn candidate_slots(idx: usize) -> &'static [usize] {
    match idx {
        0 => &[0],
        1 => &[1, 0],
        2 => &[2, 0],
        3 => &[3, 2, 0],
        _ => panic!("line index {idx} outside a four-line group"),
    }
}

/// Probe order: the predicted slot first, then the remaining candidates.
pub fn probe_order(idx: usize, predicted: Level) -> Vec<usize> {
    let first = slot_for_level(idx, predicted);
    let mut order = vec![first];
    order.extend(candidate_slots(idx).iter().copied().filter(|&s| s != first));
    order
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotImage {
    Packed(PackedPayload),
    Uncompressed(Line),
    Invalid,
}

/// Content to write into each slot for `state`.
///
/// `lines[i]` is the data of line `i` if the caller has it. Packed units
/// need all their lines; an uncompressed slot whose line was not supplied
/// comes back `None` (left as it is in memory). Vacated slots always get
/// [`SlotImage::Invalid`].
pub fn plan_writes(
    state: GroupState,
    lines: &[Option<Line>; 4],
) -> Result<[Option<SlotImage>; 4], LayoutError> {
    let mut out: [Option<SlotImage>; 4] = Default::default();
    for (slot, dst) in out.iter_mut().enumerate() {
        *dst = match state.slot_content(slot) {
            SlotContent::Invalid => Some(SlotImage::Invalid),
            SlotContent::Uncompressed(i) => lines[i].map(SlotImage::Uncompressed),
            SlotContent::Packed { level, first } => {
                let unit = (first..first + level.lines())
                    .map(|i| {
                        lines[i].ok_or(LayoutError::MissingLine {
                            state,
                            slot,
                            line: i,
                        })
                    })
                    .collect::<Result<Vec<Line>, _>>()?;
                let payload = pack_group(&unit, level)
                    .expect("unit size matches level")
                    .ok_or(LayoutError::DoesNotFit { state, slot, level })?;
                Some(SlotImage::Packed(payload))
            }
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_zero_never_moves() {
        for s in GroupState::ALL {
            assert_eq!(slot_of(0, s), 0);
        }
    }

    #[test]
    fn slot_tables() {
        let table = |s| [0, 1, 2, 3].map(|i| slot_of(i, s));
        assert_eq!(table(GroupState::U), [0, 1, 2, 3]);
        assert_eq!(table(GroupState::P01), [0, 0, 2, 3]);
        assert_eq!(table(GroupState::P23), [0, 1, 2, 2]);
        assert_eq!(table(GroupState::P01P23), [0, 0, 2, 2]);
        assert_eq!(table(GroupState::Q), [0, 0, 0, 0]);
    }

    #[test]
    fn average_candidate_count_is_two() {
        let total: usize = (0..4).map(|i| candidate_slots(i).len()).sum();
        assert_eq!(total, 8);
    }

    #[test]
    fn candidates_match_enumeration() {
        for idx in 0..4 {
            let mut seen: Vec<usize> = GroupState::ALL.iter().map(|&s| slot_of(idx, s)).collect();
            seen.sort_unstable();
            seen.dedup();
            let mut cands = candidate_slots(idx).to_vec();
            cands.sort_unstable();
            assert_eq!(seen, cands, "line {idx}");
        }
    }

    #[test]
    fn probe_order_is_permutation_of_candidates() {
        for idx in 0..4 {
            for lvl in [Level::Uncompressed, Level::X2, Level::X4] {
                let order = probe_order(idx, lvl);
                let mut a = order.clone();
                a.sort_unstable();
                let mut b = candidate_slots(idx).to_vec();
                b.sort_unstable();
                assert_eq!(a, b);
                assert_eq!(order[0], slot_for_level(idx, lvl));
            }
        }
        assert_eq!(probe_order(3, Level::X2), vec![2, 3, 0]);
        assert_eq!(probe_order(1, Level::Uncompressed), vec![1, 0]);
    }

    #[test]
    fn every_state_houses_each_line_once() {
        for s in GroupState::ALL {
            let mut resident = vec![];
            for slot in 0..4 {
                for i in 0..4 {
                    if s.slot_content(slot).contains(i) {
                        resident.push(i);
                    }
                }
            }
            resident.sort_unstable();
            assert_eq!(resident, vec![0, 1, 2, 3], "{s:?}");
        }
    }

    #[test]
    fn vacated_slots_are_invalidated() {
        let z = [Some(Line::zero()); 4];
        let invalid_slots = |s| {
            plan_writes(s, &z)
                .unwrap()
                .iter()
                .enumerate()
                .filter(|(_, w)| matches!(w, Some(SlotImage::Invalid)))
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        };
        assert_eq!(invalid_slots(GroupState::U), Vec::<usize>::new());
        assert_eq!(invalid_slots(GroupState::P01), vec![1]);
        assert_eq!(invalid_slots(GroupState::P23), vec![3]);
        assert_eq!(invalid_slots(GroupState::P01P23), vec![1, 3]);
        assert_eq!(invalid_slots(GroupState::Q), vec![1, 2, 3]);

        let q = plan_writes(GroupState::Q, &z).unwrap();
        assert!(matches!(&q[0], Some(SlotImage::Packed(p)) if p.level == PackLevel::X4));
    }

    #[test]
    fn p01_plan() {
        let lines = [0u32, 1, 2, 3].map(|i| Some(Line::from_words(&[i; 16])));
        let plan = plan_writes(GroupState::P01, &lines).unwrap();
        assert!(matches!(&plan[0], Some(SlotImage::Packed(p)) if p.level == PackLevel::X2));
        assert_eq!(plan[1], Some(SlotImage::Invalid));
        assert_eq!(plan[2], Some(SlotImage::Uncompressed(lines[2].unwrap())));
        assert_eq!(plan[3], Some(SlotImage::Uncompressed(lines[3].unwrap())));
    }

    #[test]
    fn plan_errors() {
        let mut lines = [Some(Line::zero()); 4];
        lines[1] = None;
        assert!(matches!(
            plan_writes(GroupState::P01, &lines),
            Err(LayoutError::MissingLine { line: 1, .. })
        ));
        let noisy = Line(std::array::from_fn(|i| {
            (i as u8).wrapping_mul(97).wrapping_add(13)
        }));
        let lines = [Some(noisy); 4];
        assert!(matches!(
            plan_writes(GroupState::Q, &lines),
            Err(LayoutError::DoesNotFit { .. })
        ));
        // U with nothing supplied leaves every slot alone.
        assert_eq!(
            plan_writes(GroupState::U, &[None; 4]).unwrap(),
            [None, None, None, None]
        );
    }

    #[test]
    fn csi_roundtrip() {
        for s in GroupState::ALL {
            assert_eq!(GroupState::from_csi(s.csi()).unwrap(), s);
            assert!(s.csi() < 8);
        }
        assert!(GroupState::from_csi(5).is_err());
    }
}
