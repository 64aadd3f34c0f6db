use std::fmt;

pub const LINE_BYTES: usize = 64;

/// Raw 64-byte memory image.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Line(pub [u8; LINE_BYTES]);

impl Line {
    pub const fn zero() -> Self {
        Line([0; LINE_BYTES])
    }

    pub fn as_bytes(&self) -> &[u8; LINE_BYTES] {
        &self.0
    }

    /// Build from sixteen little-endian 32-bit words.
    pub fn from_words(words: &[u32; 16]) -> Self {
        let mut b = [0u8; LINE_BYTES];
        for (chunk, w) in b.chunks_exact_mut(4).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        Line(b)
    }

    pub fn words(&self) -> [u32; 16] {
        let mut w = [0u32; 16];
        for (dst, chunk) in w.iter_mut().zip(self.0.chunks_exact(4)) {
            *dst = u32::from_le_bytes(chunk.try_into().unwrap());
        }
        w
    }

    /// The last four bytes, read little-endian. This is where markers live.
    pub fn tail(&self) -> u32 {
        u32::from_le_bytes(self.0[60..].try_into().unwrap())
    }

    pub fn inverted(&self) -> Self {
        let mut b = self.0;
        b.iter_mut().for_each(|x| *x = !*x);
        Line(b)
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Parse exactly 128 hex digits.
    pub fn from_hex(s: &str) -> Option<Self> {
        if s.len() != LINE_BYTES * 2 || !s.is_ascii() {
            return None;
        }
        let mut b = [0u8; LINE_BYTES];
        for (i, dst) in b.iter_mut().enumerate() {
            *dst = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).ok()?;
        }
        Some(Line(b))
    }
}

impl Default for Line {
    fn default() -> Self {
        Line::zero()
    }
}

impl fmt::Debug for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Line({})", self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_reads_last_four_bytes() {
        let mut b = [0u8; 64];
        b[60..].copy_from_slice(&0x2222_2222u32.to_le_bytes());
        assert_eq!(Line(b).tail(), 0x2222_2222);
    }

    #[test]
    fn hex_roundtrip_and_rejects() {
        let l = Line::from_words(&[0xdead_beef; 16]);
        assert_eq!(Line::from_hex(&l.to_hex()), Some(l));
        assert_eq!(Line::from_hex("00"), None);
        assert_eq!(Line::from_hex(&"zz".repeat(64)), None);
    }

    #[test]
    fn inversion_is_involution() {
        let l = Line::from_words(&[7; 16]);
        assert_eq!(l.inverted().inverted(), l);
        assert_ne!(l.inverted(), l);
    }
}
