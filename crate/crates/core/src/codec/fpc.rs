//! Frequent Pattern Compression over sixteen 32-bit words.
//!
//! Body layout: sixteen 3-bit prefixes first, then each word's data field in
//! word order, all packed MSB-first and zero-padded to a byte boundary.

use super::{decode_raw, Algo, CodecError, Codeword, Line, LINE_BYTES};

const WORDS: usize = 16;
const PREFIX_BITS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpcPattern {
    Zero = 0,
    SignExt4 = 1,
    SignExt8 = 2,
    SignExt16 = 3,
    /// Upper halfword stored, lower halfword zero.
    HalfPadded = 4,
    /// Each halfword is a sign-extended byte.
    TwoHalvesSe8 = 5,
    RepeatedByte = 6,
    Uncompressed = 7,
}

impl FpcPattern {
    const ALL: [FpcPattern; 8] = [
        FpcPattern::Zero,
        FpcPattern::SignExt4,
        FpcPattern::SignExt8,
        FpcPattern::SignExt16,
        FpcPattern::HalfPadded,
        FpcPattern::TwoHalvesSe8,
        FpcPattern::RepeatedByte,
        FpcPattern::Uncompressed,
    ];

    pub fn data_bits(self) -> usize {
        match self {
            FpcPattern::Zero => 0,
            FpcPattern::SignExt4 => 4,
            FpcPattern::SignExt8 | FpcPattern::RepeatedByte => 8,
            FpcPattern::SignExt16 | FpcPattern::HalfPadded | FpcPattern::TwoHalvesSe8 => 16,
            FpcPattern::Uncompressed => 32,
        }
    }

    pub fn matches(self, w: u32) -> bool {
        let s = w as i32;
        match self {
            FpcPattern::Zero => w == 0,
            FpcPattern::SignExt4 => (-8..=7).contains(&s),
            FpcPattern::SignExt8 => (-128..=127).contains(&s),
            FpcPattern::SignExt16 => (-32768..=32767).contains(&s),
            FpcPattern::HalfPadded => w & 0xffff == 0,
            FpcPattern::TwoHalvesSe8 => {
                let lo = w as u16 as i16;
                let hi = (w >> 16) as u16 as i16;
                (-128..=127).contains(&lo) && (-128..=127).contains(&hi)
            }
            FpcPattern::RepeatedByte => {
                let b = w & 0xff;
                w == b * 0x0101_0101
            }
            FpcPattern::Uncompressed => true,
        }
    }

    fn from_prefix(p: u32) -> Self {
        Self::ALL[p as usize]
    }

    /// Cheapest matching pattern; lower prefix wins between equal sizes.
    fn choose(w: u32) -> Self {
        Self::ALL
            .iter()
            .copied()
            .filter(|p| p.matches(w))
            .min_by_key(|p| (p.data_bits(), *p as u8))
            .unwrap()
    }

    fn encode(self, w: u32) -> u32 {
        match self {
            FpcPattern::Zero => 0,
            FpcPattern::SignExt4 => w & 0xf,
            FpcPattern::SignExt8 | FpcPattern::RepeatedByte => w & 0xff,
            FpcPattern::SignExt16 => w & 0xffff,
            FpcPattern::HalfPadded => w >> 16,
            FpcPattern::TwoHalvesSe8 => ((w >> 16) & 0xff) << 8 | (w & 0xff),
            FpcPattern::Uncompressed => w,
        }
    }

    fn decode(self, d: u32) -> u32 {
        let sext = |v: u32, bits: u32| (((v << (32 - bits)) as i32) >> (32 - bits)) as u32;
        match self {
            FpcPattern::Zero => 0,
            FpcPattern::SignExt4 => sext(d, 4),
            FpcPattern::SignExt8 => sext(d, 8),
            FpcPattern::SignExt16 => sext(d, 16),
            FpcPattern::HalfPadded => d << 16,
            FpcPattern::TwoHalvesSe8 => {
                let lo = sext(d & 0xff, 8) & 0xffff;
                let hi = sext(d >> 8, 8) & 0xffff;
                hi << 16 | lo
            }
            FpcPattern::RepeatedByte => d * 0x0101_0101,
            FpcPattern::Uncompressed => d,
        }
    }
}

struct BitWriter {
    out: Vec<u8>,
    nbits: usize,
}

impl BitWriter {
    fn new() -> Self {
        BitWriter {
            out: Vec::with_capacity(LINE_BYTES + 8),
            nbits: 0,
        }
    }

    fn put(&mut self, value: u32, bits: usize) {
        for i in (0..bits).rev() {
            if self.nbits.is_multiple_of(8) {
                self.out.push(0);
            }
            let bit = (value >> i) & 1;
            *self.out.last_mut().unwrap() |= (bit as u8) << (7 - self.nbits % 8);
            self.nbits += 1;
        }
    }
}

struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl BitReader<'_> {
    fn get(&mut self, bits: usize) -> u32 {
        let mut v = 0u32;
        for _ in 0..bits {
            let bit = (self.data[self.pos / 8] >> (7 - self.pos % 8)) & 1;
            v = v << 1 | bit as u32;
            self.pos += 1;
        }
        v
    }
}

pub fn fpc_compress(line: &Line) -> Codeword {
    let words = line.words();
    let patterns: [FpcPattern; WORDS] = std::array::from_fn(|i| FpcPattern::choose(words[i]));

    let total_bits: usize =
        WORDS * PREFIX_BITS + patterns.iter().map(|p| p.data_bits()).sum::<usize>();
    if total_bits.div_ceil(8) >= LINE_BYTES {
        return Codeword::raw(line);
    }

    let mut bw = BitWriter::new();
    for p in &patterns {
        bw.put(*p as u32, PREFIX_BITS);
    }
    for (p, w) in patterns.iter().zip(words) {
        bw.put(p.encode(w), p.data_bits());
    }
    debug_assert_eq!(bw.out.len(), total_bits.div_ceil(8));
    Codeword {
        algo: Algo::Fpc,
        body: bw.out,
    }
}

/// Inverts [`fpc_compress`]. Accepts the RAW fallback as well.
pub fn fpc_decompress(cw: &Codeword) -> Result<Line, CodecError> {
    match cw.algo {
        Algo::Raw => return decode_raw(&cw.body),
        Algo::Fpc => {}
        other => {
            return Err(CodecError::WrongAlgo {
                got: other,
                decoder: Algo::Fpc,
            })
        }
    }
    let prefix_bytes = (WORDS * PREFIX_BITS).div_ceil(8);
    if cw.body.len() < prefix_bytes {
        return Err(CodecError::BodyLength {
            algo: Algo::Fpc,
            got: cw.body.len(),
            expected: prefix_bytes,
        });
    }
    let mut br = BitReader {
        data: &cw.body,
        pos: 0,
    };
    let patterns: [FpcPattern; WORDS] =
        std::array::from_fn(|_| FpcPattern::from_prefix(br.get(PREFIX_BITS)));
    let total_bits: usize =
        WORDS * PREFIX_BITS + patterns.iter().map(|p| p.data_bits()).sum::<usize>();
    if cw.body.len() != total_bits.div_ceil(8) {
        return Err(CodecError::BodyLength {
            algo: Algo::Fpc,
            got: cw.body.len(),
            expected: total_bits.div_ceil(8),
        });
    }
    let words: [u32; WORDS] = std::array::from_fn(|i| {
        let p = patterns[i];
        p.decode(br.get(p.data_bits()))
    });
    Ok(Line::from_words(&words))
}
