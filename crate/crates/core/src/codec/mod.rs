//! Single-line compressors (FPC, BDI and their hybrid) and the packer that
//! places 2 or 4 compressed neighbours into one 60-byte payload.
//!
//! Every codeword carries an algorithm id. Its accounted size is the body
//! length plus one byte, which is exactly what a packed payload spends on the
//! per-sub-line header byte.

mod bdi;
mod fpc;
mod line;
mod pack;

pub use bdi::{bdi_compress, bdi_decompress, BdiVariant};
pub use fpc::{fpc_compress, fpc_decompress, FpcPattern};
pub use line::{Line, LINE_BYTES};
pub use pack::{pack_group, packed_size, unpack_group, PackLevel, PackedPayload, PAYLOAD_BYTES};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("{algo:?} body has {got} bytes, expected {expected}")]
    BodyLength {
        algo: Algo,
        got: usize,
        expected: usize,
    },
    #[error("codeword algorithm {got:?} cannot be decoded by the {decoder:?} decoder")]
    WrongAlgo { got: Algo, decoder: Algo },
    #[error("empty codeword body")]
    Empty,
    #[error("unknown BDI variant id {0}")]
    UnknownVariant(u8),
    #[error("unknown algorithm id {0}")]
    UnknownAlgo(u8),
    #[error("packed header declares sub-line length {0} (> 60)")]
    SubLength(usize),
    #[error("packed sub-lines need {0} bytes, payload holds 60")]
    PayloadOverrun(usize),
    #[error("{level:?} packing needs {expected} lines, got {got}")]
    LineCount {
        level: PackLevel,
        expected: usize,
        got: usize,
    },
}

/// Compression algorithm tag. The numeric value is the 2-bit id used in
/// packed headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    Fpc = 0,
    Bdi = 1,
    Raw = 2,
}

impl Algo {
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Result<Self, CodecError> {
        match id {
            0 => Ok(Algo::Fpc),
            1 => Ok(Algo::Bdi),
            2 => Ok(Algo::Raw),
            other => Err(CodecError::UnknownAlgo(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub algo: Algo,
    pub body: Vec<u8>,
}

impl Codeword {
    pub(crate) fn raw(line: &Line) -> Self {
        Codeword {
            algo: Algo::Raw,
            body: line.as_bytes().to_vec(),
        }
    }

    /// Accounted size in bytes: body plus the one-byte algorithm tag.
    pub fn size(&self) -> usize {
        self.body.len() + 1
    }

    pub fn decode(&self) -> Result<Line, CodecError> {
        match self.algo {
            Algo::Fpc => fpc_decompress(self),
            Algo::Bdi => bdi_decompress(self),
            Algo::Raw => decode_raw(&self.body),
        }
    }
}

pub(crate) fn decode_raw(body: &[u8]) -> Result<Line, CodecError> {
    let bytes: [u8; LINE_BYTES] = body.try_into().map_err(|_| CodecError::BodyLength {
        algo: Algo::Raw,
        got: body.len(),
        expected: LINE_BYTES,
    })?;
    Ok(Line(bytes))
}

/// Compress with both FPC and BDI and keep the smaller result. FPC wins ties.
pub fn hybrid_compress(line: &Line) -> Codeword {
    let fpc = fpc_compress(line);
    let bdi = bdi_compress(line);
    if bdi.body.len() < fpc.body.len() {
        bdi
    } else {
        fpc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_line_prefers_bdi() {
        let z = Line::zero();
        let fpc = fpc_compress(&z);
        let bdi = bdi_compress(&z);
        assert_eq!(fpc.body.len(), 6);
        assert_eq!(bdi.body.len(), 1);
        let h = hybrid_compress(&z);
        assert_eq!(h.algo, Algo::Bdi);
        assert_eq!(h.decode().unwrap(), z);
    }

    #[test]
    fn tie_goes_to_fpc() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut ties = 0;
        for _ in 0..20_000 {
            let base: u32 = rng.random_range(0..4096);
            let words: [u32; 16] = std::array::from_fn(|i| {
                if i % 2 == 1 {
                    0
                } else {
                    base + rng.random_range(0..300)
                }
            });
            let l = Line::from_words(&words);
            let (f, b) = (fpc_compress(&l), bdi_compress(&l));
            if f.body.len() == b.body.len() {
                ties += 1;
                assert_eq!(hybrid_compress(&l).algo, Algo::Fpc);
            }
        }
        assert!(ties > 0, "search space produced no ties");
    }

    #[test]
    fn random_line_is_raw() {
        use rand::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut b = [0u8; 64];
        rng.fill_bytes(&mut b);
        let l = Line(b);
        let h = hybrid_compress(&l);
        assert_eq!(h.algo, Algo::Raw);
        assert_eq!(h.size(), 65);
    }

    #[test]
    fn algo_ids_roundtrip() {
        for a in [Algo::Fpc, Algo::Bdi, Algo::Raw] {
            assert_eq!(Algo::from_id(a.id()).unwrap(), a);
        }
        assert!(Algo::from_id(3).is_err());
    }
}
