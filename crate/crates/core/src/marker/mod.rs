//! Implicit compression status.
//!
//! A packed slot ends in a per-line 32-bit marker (`m2` for 2:1, `m4` for
//! 4:1). Slots vacated by packing hold the 64-byte invalid-line image. An
//! uncompressed line that would be mistaken for either is stored inverted and
//! its address recorded in the [`Lit`].

mod lit;

pub use lit::{
    Lit, LitDelta, LitEffect, LitEntry, LitOverflow, LitProbe, LIT_ADDR_BITS, LIT_ENTRIES,
};

use std::hash::Hasher;

use siphasher::sip::SipHasher13;

use crate::codec::{PackLevel, PackedPayload, PAYLOAD_BYTES};
use crate::Line;

pub const FIXED_M2: u32 = 0x2222_2222;
pub const FIXED_M4: u32 = 0x4444_4444;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkerMode {
    PerLine,
    Fixed,
}

/// How many low bits of the tail word take part in marker comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkerBits {
    B32,
    /// Test mode: only the low byte is compared.
    B8,
}

impl MarkerBits {
    pub fn mask(self) -> u32 {
        match self {
            MarkerBits::B32 => u32::MAX,
            MarkerBits::B8 => 0xff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MarkerConfig {
    pub mode: MarkerMode,
    pub bits: MarkerBits,
    pub per_line_il: bool,
}

impl Default for MarkerConfig {
    fn default() -> Self {
        MarkerConfig {
            mode: MarkerMode::PerLine,
            bits: MarkerBits::B32,
            per_line_il: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarkerSet {
    pub m2: u32,
    pub m4: u32,
    pub il: Line,
    pub mask: u32,
}

impl MarkerSet {
    fn masked(&self, v: u32) -> u32 {
        v & self.mask
    }

    pub fn marker(&self, level: PackLevel) -> u32 {
        match level {
            PackLevel::X2 => self.m2,
            PackLevel::X4 => self.m4,
        }
    }

    /// Tail matches `m2` or `m4`, or the whole line is the invalid image.
    pub fn needs_inversion(&self, data: &Line) -> bool {
        let t = self.masked(data.tail());
        t == self.masked(self.m2) || t == self.masked(self.m4) || *data == self.il
    }

    /// Payload bytes followed by the level's marker.
    pub fn seal(&self, payload: &PackedPayload) -> Line {
        let mut b = [0u8; 64];
        b[..PAYLOAD_BYTES].copy_from_slice(&payload.to_bytes());
        b[PAYLOAD_BYTES..].copy_from_slice(&self.marker(payload.level).to_le_bytes());
        Line(b)
    }

    fn tail_set(&self) -> [u32; 4] {
        [self.m2, self.m4, !self.m2, !self.m4].map(|v| self.masked(v))
    }
}

fn markers_valid(m2: u32, m4: u32, mask: u32) -> bool {
    let s = [m2, m4, !m2, !m4].map(|v| v & mask);
    // Nonzero so untouched (all-zero) memory never matches or needs the LIT.
    s.iter().all(|&v| v != 0) && (0..4).all(|i| (i + 1..4).all(|j| s[i] != s[j]))
}

fn il_valid(il: &Line, tails: &[u32; 4], mask: u32) -> bool {
    let t = il.tail() & mask;
    *il != Line::zero() && *il != Line::zero().inverted() && !tails.contains(&t)
}

const DOMAIN_MARKER: u8 = 1;
const DOMAIN_IL: u8 = 2;

/// Derives marker sets from a 128-bit key with a keyed PRF.
#[derive(Debug, Clone)]
pub struct MarkerGen {
    cfg: MarkerConfig,
    key: u128,
    global_il: Line,
}

impl MarkerGen {
    pub fn new(key: u128, cfg: MarkerConfig) -> Self {
        let mut gen = MarkerGen {
            cfg,
            key,
            global_il: Line::zero(),
        };
        gen.global_il = gen.derive_global_il();
        gen
    }

    pub fn key(&self) -> u128 {
        self.key
    }

    pub fn config(&self) -> MarkerConfig {
        self.cfg
    }

    fn prf(&self, domain: u8, addr: u64, tweak: u32, word: u32) -> u64 {
        let mut h = SipHasher13::new_with_keys(self.key as u64, (self.key >> 64) as u64);
        h.write_u8(domain);
        h.write_u64(addr);
        h.write_u32(tweak);
        h.write_u32(word);
        h.finish()
    }

    fn il_image(&self, addr: u64, tweak: u32) -> Line {
        let mut b = [0u8; 64];
        for (i, c) in b.chunks_exact_mut(8).enumerate() {
            c.copy_from_slice(&self.prf(DOMAIN_IL, addr, tweak, i as u32).to_le_bytes());
        }
        Line(b)
    }

    fn derive_global_il(&self) -> Line {
        let mask = self.cfg.bits.mask();
        // Under per-line markers the markers avoid the invalid image instead.
        let fixed_tails = [FIXED_M2, FIXED_M4, !FIXED_M2, !FIXED_M4].map(|v| v & mask);
        (0u32..)
            .map(|t| self.il_image(u64::MAX, t))
            .find(|il| match self.cfg.mode {
                MarkerMode::Fixed => il_valid(il, &fixed_tails, mask),
                MarkerMode::PerLine => il_valid(il, &[0; 4], mask),
            })
            .expect("tweak space exhausted")
    }

    /// Invalid-line image in force for every address when not per-line.
    pub fn global_il(&self) -> Line {
        self.global_il
    }

    pub fn markers(&self, addr: u64) -> MarkerSet {
        let mask = self.cfg.bits.mask();
        let (m2, m4) = match self.cfg.mode {
            MarkerMode::Fixed => (FIXED_M2, FIXED_M4),
            MarkerMode::PerLine => {
                let il_tail = (!self.cfg.per_line_il).then(|| self.global_il.tail() & mask);
                (0u32..)
                    .map(|t| {
                        let v = self.prf(DOMAIN_MARKER, addr, t, 0);
                        (v as u32, (v >> 32) as u32)
                    })
                    .find(|&(m2, m4)| {
                        markers_valid(m2, m4, mask)
                            && il_tail
                                .is_none_or(|it| ![m2, m4, !m2, !m4].iter().any(|v| v & mask == it))
                    })
                    .expect("tweak space exhausted")
            }
        };
        let mut set = MarkerSet {
            m2,
            m4,
            il: self.global_il,
            mask,
        };
        if self.cfg.per_line_il {
            let tails = set.tail_set();
            set.il = (0u32..)
                .map(|t| self.il_image(addr, t))
                .find(|il| il_valid(il, &tails, mask))
                .expect("tweak space exhausted");
        }
        set
    }
}

/// What a raw slot image holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    CompressedX2([u8; PAYLOAD_BYTES]),
    CompressedX4([u8; PAYLOAD_BYTES]),
    InvalidSlot,
    Uncompressed(Line),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classified {
    pub kind: Classification,
    /// The inversion lookup went to the in-memory bitmap.
    pub bitmap_access: bool,
}

fn payload_of(raw: &Line) -> [u8; PAYLOAD_BYTES] {
    raw.0[..PAYLOAD_BYTES].try_into().unwrap()
}

pub fn classify(addr: u64, raw: &Line, ms: &MarkerSet, lit: &Lit) -> Classified {
    let complement = |raw: &Line| {
        let p = lit.probe(addr);
        Classified {
            kind: Classification::Uncompressed(if p.inverted { raw.inverted() } else { *raw }),
            bitmap_access: p.bitmap_access,
        }
    };
    let plain = |kind| Classified {
        kind,
        bitmap_access: false,
    };
    if *raw == ms.il {
        return plain(Classification::InvalidSlot);
    }
    if *raw == ms.il.inverted() {
        return complement(raw);
    }
    let t = raw.tail() & ms.mask;
    if t == ms.m4 & ms.mask {
        return plain(Classification::CompressedX4(payload_of(raw)));
    }
    if t == ms.m2 & ms.mask {
        return plain(Classification::CompressedX2(payload_of(raw)));
    }
    if t == !ms.m2 & ms.mask || t == !ms.m4 & ms.mask {
        return complement(raw);
    }
    plain(Classification::Uncompressed(*raw))
}

/// Raw image to store for an uncompressed line, plus the LIT change.
///
/// Data equal to the complement of the invalid image is stored as-is: its
/// inversion would be the invalid image itself.
pub fn prepare_uncompressed_write(
    addr: u64,
    data: &Line,
    ms: &MarkerSet,
    lit: &Lit,
) -> (Line, LitDelta) {
    if ms.needs_inversion(data) {
        (data.inverted(), LitDelta::Insert(addr))
    } else if lit.contains(addr) {
        (*data, LitDelta::Remove(addr))
    } else {
        (*data, LitDelta::None)
    }
}
