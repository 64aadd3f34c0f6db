//! Base-Delta-Immediate with a single explicit base (the first element).
//!
//! Body layout: `[variant id][base, little-endian][deltas, two's complement]`.

use super::{decode_raw, Algo, CodecError, Codeword, Line, LINE_BYTES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BdiVariant {
    Zeros = 0,
    Repeat8 = 1,
    B8D1 = 2,
    B8D2 = 3,
    B8D4 = 4,
    B4D1 = 5,
    B4D2 = 6,
    B2D1 = 7,
}

impl BdiVariant {
    pub const ALL: [BdiVariant; 8] = [
        BdiVariant::Zeros,
        BdiVariant::Repeat8,
        BdiVariant::B8D1,
        BdiVariant::B8D2,
        BdiVariant::B8D4,
        BdiVariant::B4D1,
        BdiVariant::B4D2,
        BdiVariant::B2D1,
    ];

    fn from_id(id: u8) -> Result<Self, CodecError> {
        Self::ALL
            .get(id as usize)
            .copied()
            .ok_or(CodecError::UnknownVariant(id))
    }

    /// (base width, delta width) in bytes for the base+delta variants.
    fn widths(self) -> Option<(usize, usize)> {
        match self {
            BdiVariant::B8D1 => Some((8, 1)),
            BdiVariant::B8D2 => Some((8, 2)),
            BdiVariant::B8D4 => Some((8, 4)),
            BdiVariant::B4D1 => Some((4, 1)),
            BdiVariant::B4D2 => Some((4, 2)),
            BdiVariant::B2D1 => Some((2, 1)),
            BdiVariant::Zeros | BdiVariant::Repeat8 => None,
        }
    }

    /// Body length including the variant byte.
    pub fn body_len(self) -> usize {
        match self {
            BdiVariant::Zeros => 1,
            BdiVariant::Repeat8 => 1 + 8,
            v => {
                let (b, d) = v.widths().unwrap();
                1 + b + (LINE_BYTES / b) * d
            }
        }
    }
}

fn elements(line: &Line, width: usize) -> Vec<u64> {
    line.0
        .chunks_exact(width)
        .map(|c| {
            let mut buf = [0u8; 8];
            buf[..width].copy_from_slice(c);
            u64::from_le_bytes(buf)
        })
        .collect()
}

fn mask(bytes: usize) -> u64 {
    if bytes == 8 {
        u64::MAX
    } else {
        (1u64 << (8 * bytes)) - 1
    }
}

/// Sign-extend the low `bytes` bytes of `v` to 64 bits.
fn sext(v: u64, bytes: usize) -> i64 {
    let shift = 64 - 8 * bytes as u32;
    ((v << shift) as i64) >> shift
}

fn try_base_delta(line: &Line, variant: BdiVariant) -> Option<Vec<u8>> {
    let (bw, dw) = variant.widths()?;
    let elems = elements(line, bw);
    let base = elems[0];
    let mut body = Vec::with_capacity(variant.body_len());
    body.push(variant as u8);
    body.extend_from_slice(&base.to_le_bytes()[..bw]);
    for &e in &elems {
        let delta = e.wrapping_sub(base) & mask(bw);
        let signed = sext(delta, bw);
        if sext(signed as u64, dw) != signed {
            return None;
        }
        body.extend_from_slice(&(signed as u64).to_le_bytes()[..dw]);
    }
    debug_assert_eq!(body.len(), variant.body_len());
    Some(body)
}

pub fn bdi_compress(line: &Line) -> Codeword {
    let body = if line.0.iter().all(|&b| b == 0) {
        vec![BdiVariant::Zeros as u8]
    } else if let Some(body) = repeat8(line) {
        body
    } else {
        // Variants are tried smallest first; equal sizes keep the lower id.
        let mut order: Vec<BdiVariant> = BdiVariant::ALL[2..].to_vec();
        order.sort_by_key(|v| (v.body_len(), *v as u8));
        match order.into_iter().find_map(|v| try_base_delta(line, v)) {
            Some(body) => body,
            None => return Codeword::raw(line),
        }
    };
    Codeword {
        algo: Algo::Bdi,
        body,
    }
}

fn repeat8(line: &Line) -> Option<Vec<u8>> {
    let e = elements(line, 8);
    if e.iter().all(|&x| x == e[0]) {
        let mut body = vec![BdiVariant::Repeat8 as u8];
        body.extend_from_slice(&e[0].to_le_bytes());
        Some(body)
    } else {
        None
    }
}

/// Inverts [`bdi_compress`]. Accepts the RAW fallback as well.
pub fn bdi_decompress(cw: &Codeword) -> Result<Line, CodecError> {
    match cw.algo {
        Algo::Raw => return decode_raw(&cw.body),
        Algo::Bdi => {}
        other => {
            return Err(CodecError::WrongAlgo {
                got: other,
                decoder: Algo::Bdi,
            })
        }
    }
    let (&id, rest) = cw.body.split_first().ok_or(CodecError::Empty)?;
    let variant = BdiVariant::from_id(id)?;
    if cw.body.len() != variant.body_len() {
        return Err(CodecError::BodyLength {
            algo: Algo::Bdi,
            got: cw.body.len(),
            expected: variant.body_len(),
        });
    }
    let mut out = [0u8; LINE_BYTES];
    match variant {
        BdiVariant::Zeros => {}
        BdiVariant::Repeat8 => {
            for chunk in out.chunks_exact_mut(8) {
                chunk.copy_from_slice(rest);
            }
        }
        v => {
            let (bw, dw) = v.widths().unwrap();
            let mut buf = [0u8; 8];
            buf[..bw].copy_from_slice(&rest[..bw]);
            let base = u64::from_le_bytes(buf);
            for (chunk, d) in out.chunks_exact_mut(bw).zip(rest[bw..].chunks_exact(dw)) {
                let mut dbuf = [0u8; 8];
                dbuf[..dw].copy_from_slice(d);
                let delta = sext(u64::from_le_bytes(dbuf), dw) as u64;
                let value = base.wrapping_add(delta) & mask(bw);
                chunk.copy_from_slice(&value.to_le_bytes()[..bw]);
            }
        }
    }
    Ok(Line(out))
}
