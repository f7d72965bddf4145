//! Bit streams and self-delimiting integer codes.
//!
//! Bits are stored most-significant-bit first: bit `i` of a stream is bit
//! `7 - i % 8` of byte `i / 8`. Unused bits of the final byte are zero.

use crate::error::{Error, Result};

/// Append-only bit sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps a zero-padded byte buffer holding `len` bits.
    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Result<Self> {
        if len > bytes.len() * 8 || bytes.len() != len.div_ceil(8) {
            return Err(Error::format(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        if !len.is_multiple_of(8) && bytes[len / 8] << (len % 8) != 0 {
            return Err(Error::format("nonzero padding bits"));
        }
        Ok(BitStream { bytes, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Zero-padded byte form.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader::new(&self.bytes, self.len)
    }

    pub fn write_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Writes the low `width` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        debug_assert!(width == 64 || value >> width == 0);
        let mut remaining = width;
        while remaining > 0 {
            let used = (self.len % 8) as u32;
            if used == 0 {
                self.bytes.push(0);
            }
            let room = 8 - used;
            let take = room.min(remaining);
            let chunk = ((value >> (remaining - take)) & ((1u64 << take) - 1)) as u8;
            *self.bytes.last_mut().unwrap() |= chunk << (room - take);
            self.len += take as usize;
            remaining -= take;
        }
    }

    /// Elias gamma: `floor(log2 x)` zeros followed by the binary form of `x`.
    pub fn write_gamma(&mut self, x: u64) {
        assert!(x >= 1, "gamma code needs a positive integer");
        let bits = 64 - x.leading_zeros();
        self.write_bits(0, bits - 1);
        self.write_bits(x, bits);
    }

    /// Zig-zag (`d <= 0` maps to `-2d + 1`, `d > 0` to `2d`) then gamma.
    pub fn write_signed(&mut self, d: i64) {
        self.write_gamma(zigzag(d));
    }

    pub fn append(&mut self, other: &BitStream) {
        if self.len.is_multiple_of(8) {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
            return;
        }
        let full = other.len / 8;
        for &b in &other.bytes[..full] {
            self.write_bits(b as u64, 8);
        }
        let tail = (other.len % 8) as u32;
        if tail > 0 {
            self.write_bits((other.bytes[full] >> (8 - tail)) as u64, tail);
        }
    }
}

fn zigzag(d: i64) -> u64 {
    assert!(d.unsigned_abs() < 1 << 62, "signed value out of range");
    if d <= 0 {
        (-2 * d + 1) as u64
    } else {
        2 * d as u64
    }
}

fn unzigzag(z: u64) -> i64 {
    if z % 2 == 1 {
        -((z / 2) as i64)
    } else {
        (z / 2) as i64
    }
}

/// Length in bits of the gamma codeword for `x >= 1`.
pub fn gamma_len(x: u64) -> usize {
    2 * (63 - x.leading_zeros() as usize) + 1
}

pub fn signed_len(d: i64) -> usize {
    gamma_len(zigzag(d))
}

/// Read cursor over a bit sequence.
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    len: usize,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8], len: usize) -> Self {
        debug_assert!(len <= bytes.len() * 8);
        BitReader { bytes, len, pos: 0 }
    }

    /// Bits consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.len - self.pos
    }

    fn truncated(&self) -> Error {
        Error::Codec {
            at: self.pos,
            len: self.len,
        }
    }

    /// Next 64 bits from the cursor, left-aligned; bits past the end read as
    /// zero.
    fn peek64(&self) -> u64 {
        let byte = self.pos / 8;
        let shift = (self.pos % 8) as u32;
        let mut word = if let Some(chunk) = self.bytes.get(byte..byte + 9) {
            let hi = u64::from_be_bytes(chunk[..8].try_into().unwrap());
            (hi << shift) | ((chunk[8] as u64) << shift >> 8)
        } else {
            let mut buf = [0u8; 9];
            let avail = self.bytes.len().saturating_sub(byte).min(9);
            buf[..avail].copy_from_slice(&self.bytes[byte..byte + avail]);
            let hi = u64::from_be_bytes(buf[..8].try_into().unwrap());
            (hi << shift) | ((buf[8] as u64) << shift >> 8)
        };
        let left = self.len - self.pos;
        if left < 64 {
            word &= !(u64::MAX >> left);
        }
        word
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.len {
            return Err(self.truncated());
        }
        let bit = self.bytes[self.pos / 8] & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        debug_assert!(width <= 64);
        if width == 0 {
            return Ok(0);
        }
        if self.remaining() < width as usize {
            return Err(self.truncated());
        }
        let value = self.peek64() >> (64 - width);
        self.pos += width as usize;
        Ok(value)
    }

    pub fn read_gamma(&mut self) -> Result<u64> {
        let word = self.peek64();
        let zeros = word.leading_zeros() as usize;
        if zeros >= 64 {
            // Either truncated or a codeword wider than 64 bits.
            return Err(self.truncated());
        }
        if self.remaining() < 2 * zeros + 1 {
            return Err(self.truncated());
        }
        let value = if 2 * zeros < 64 {
            let v = word >> (63 - 2 * zeros);
            self.pos += 2 * zeros + 1;
            v
        } else {
            self.pos += zeros;
            self.read_bits(zeros as u32 + 1)?
        };
        Ok(value)
    }

    pub fn read_signed(&mut self) -> Result<i64> {
        Ok(unzigzag(self.read_gamma()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits_of(s: &BitStream) -> String {
        let mut r = s.reader();
        (0..s.len())
            .map(|_| if r.read_bit().unwrap() { '1' } else { '0' })
            .collect()
    }

    #[test]
    fn gamma_codewords() {
        let mut s = BitStream::new();
        s.write_gamma(1);
        assert_eq!(bits_of(&s), "1");
        let mut s = BitStream::new();
        s.write_gamma(5);
        assert_eq!(bits_of(&s), "00101");
        let mut s = BitStream::new();
        s.write_gamma(1 << 30);
        assert_eq!(s.len(), 61);
        assert_eq!(s.reader().read_gamma().unwrap(), 1 << 30);
    }

    #[test]
    fn signed_codewords() {
        let mut s = BitStream::new();
        s.write_signed(0);
        assert_eq!(bits_of(&s), "1");
        let mut s = BitStream::new();
        s.write_signed(-1);
        assert_eq!(bits_of(&s), "011");
        let mut s = BitStream::new();
        s.write_signed(1);
        assert_eq!(bits_of(&s), "010");
    }

    #[test]
    fn signed_round_trip_small_range() {
        let mut s = BitStream::new();
        for d in -1000..=1000 {
            s.write_signed(d);
        }
        let mut r = s.reader();
        for d in -1000..=1000 {
            assert_eq!(r.read_signed().unwrap(), d);
        }
        assert_eq!(r.remaining(), 0);
    }

    #[test]
    fn wide_gamma_codes() {
        let mut s = BitStream::new();
        s.write_bit(true);
        for x in [u32::MAX as u64, 1 << 40, (1 << 63) + 12345] {
            s.write_gamma(x);
        }
        let mut r = s.reader();
        assert!(r.read_bit().unwrap());
        assert_eq!(r.read_gamma().unwrap(), u32::MAX as u64);
        assert_eq!(r.read_gamma().unwrap(), 1 << 40);
        assert_eq!(r.read_gamma().unwrap(), (1 << 63) + 12345);
    }

    #[test]
    fn truncation_is_an_error() {
        let mut s = BitStream::new();
        s.write_gamma(100);
        let bytes = s.as_bytes().to_vec();
        let mut r = BitReader::new(&bytes, s.len() - 1);
        assert!(matches!(r.read_gamma(), Err(Error::Codec { .. })));
        let mut r = BitReader::new(&[], 0);
        assert!(r.read_bit().is_err());
        assert!(r.read_gamma().is_err());
        assert!(r.read_bits(3).is_err());
    }

    #[test]
    fn from_bytes_checks_padding() {
        assert!(BitStream::from_bytes(vec![0b1010_0000], 3).is_ok());
        assert!(BitStream::from_bytes(vec![0b1010_0001], 3).is_err());
        assert!(BitStream::from_bytes(vec![0, 0], 3).is_err());
    }

    proptest! {
        #[test]
        fn concatenated_codewords_parse_in_order(
            values in prop::collection::vec((1u64..u64::MAX, -(1i64 << 40)..(1i64 << 40), 0u32..=64), 0..64)
        ) {
            let mut s = BitStream::new();
            for &(g, d, w) in &values {
                s.write_gamma(g);
                s.write_signed(d);
                let masked = if w == 64 { g } else { g & ((1u64 << w) - 1) };
                s.write_bits(masked, w);
            }
            let mut r = s.reader();
            for &(g, d, w) in &values {
                prop_assert_eq!(r.read_gamma().unwrap(), g);
                prop_assert_eq!(r.read_signed().unwrap(), d);
                let masked = if w == 64 { g } else { g & ((1u64 << w) - 1) };
                prop_assert_eq!(r.read_bits(w).unwrap(), masked);
            }
            prop_assert_eq!(r.remaining(), 0);
        }

        #[test]
        fn append_matches_direct_writes(
            a in prop::collection::vec(1u64..1000, 0..20),
            b in prop::collection::vec(1u64..1000, 0..20),
        ) {
            let mut direct = BitStream::new();
            let mut left = BitStream::new();
            let mut right = BitStream::new();
            for &x in &a { direct.write_gamma(x); left.write_gamma(x); }
            for &x in &b { direct.write_gamma(x); right.write_gamma(x); }
            left.append(&right);
            prop_assert_eq!(left, direct);
        }

        #[test]
        fn signed_length_bound(d in -(1i64 << 40)..(1i64 << 40)) {
            let bound = 3.0 + 2.0 * (1.0 + d.unsigned_abs() as f64).log2();
            prop_assert!(signed_len(d) as f64 <= bound + 1e-9);
        }
    }
}
