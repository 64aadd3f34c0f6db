use super::{hybrid_compress, Algo, CodecError, Codeword, Line};

/// Bytes available to packed sub-lines; the last four bytes hold the marker.
pub const PAYLOAD_BYTES: usize = 60;

const LEN_BITS: u8 = 6;
const LEN_MASK: u8 = (1 << LEN_BITS) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PackLevel {
    X2,
    X4,
}

impl PackLevel {
    pub fn lines(self) -> usize {
        match self {
            PackLevel::X2 => 2,
            PackLevel::X4 => 4,
        }
    }
}

/// 2 or 4 codewords preceded by one header byte each
/// (`algo << 6 | body_len`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedPayload {
    pub level: PackLevel,
    pub subs: Vec<Codeword>,
}

impl PackedPayload {
    pub fn serialized_len(&self) -> usize {
        self.subs.iter().map(Codeword::size).sum()
    }

    pub fn to_bytes(&self) -> [u8; PAYLOAD_BYTES] {
        let mut out = [0u8; PAYLOAD_BYTES];
        let n = self.subs.len();
        let mut pos = n;
        for (i, cw) in self.subs.iter().enumerate() {
            out[i] = cw.algo.id() << LEN_BITS | cw.body.len() as u8;
            out[pos..pos + cw.body.len()].copy_from_slice(&cw.body);
            pos += cw.body.len();
        }
        out
    }

    pub fn parse(level: PackLevel, bytes: &[u8; PAYLOAD_BYTES]) -> Result<Self, CodecError> {
        let n = level.lines();
        let mut pos = n;
        let mut subs = Vec::with_capacity(n);
        for &h in &bytes[..n] {
            let algo = Algo::from_id(h >> LEN_BITS)?;
            let len = (h & LEN_MASK) as usize;
            if len > PAYLOAD_BYTES {
                return Err(CodecError::SubLength(len));
            }
            if pos + len > PAYLOAD_BYTES {
                return Err(CodecError::PayloadOverrun(pos + len));
            }
            subs.push(Codeword {
                algo,
                body: bytes[pos..pos + len].to_vec(),
            });
            pos += len;
        }
        Ok(PackedPayload { level, subs })
    }
}

fn check_count(lines: &[Line], level: PackLevel) -> Result<(), CodecError> {
    if lines.len() != level.lines() {
        return Err(CodecError::LineCount {
            level,
            expected: level.lines(),
            got: lines.len(),
        });
    }
    Ok(())
}

/// Header plus bodies if `lines` were packed together, whether or not it fits.
pub fn packed_size(lines: &[Line]) -> usize {
    lines.iter().map(|l| hybrid_compress(l).size()).sum()
}

/// Pack 2 (X2) or 4 (X4) lines; `None` when they do not fit in 60 bytes.
pub fn pack_group(lines: &[Line], level: PackLevel) -> Result<Option<PackedPayload>, CodecError> {
    check_count(lines, level)?;
    let subs: Vec<Codeword> = lines.iter().map(hybrid_compress).collect();
    let payload = PackedPayload { level, subs };
    Ok((payload.serialized_len() <= PAYLOAD_BYTES).then_some(payload))
}

pub fn unpack_group(p: &PackedPayload) -> Result<Vec<Line>, CodecError> {
    if p.subs.len() != p.level.lines() {
        return Err(CodecError::LineCount {
            level: p.level,
            expected: p.level.lines(),
            got: p.subs.len(),
        });
    }
    if p.serialized_len() > PAYLOAD_BYTES {
        return Err(CodecError::PayloadOverrun(p.serialized_len()));
    }
    for cw in &p.subs {
        if cw.body.len() > PAYLOAD_BYTES {
            return Err(CodecError::SubLength(cw.body.len()));
        }
    }
    p.subs.iter().map(Codeword::decode).collect()
}
