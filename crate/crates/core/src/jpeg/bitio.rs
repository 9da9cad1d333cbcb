//! Bit-level access to entropy-coded segments with 0xFF byte stuffing.

use super::error::{malformed, Result};

pub(crate) struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u64,
    nbits: u32,
    at_marker: bool,
}

impl<'a> BitReader<'a> {
    pub(crate) fn new(data: &'a [u8], pos: usize) -> Self {
        BitReader {
            data,
            pos,
            acc: 0,
            nbits: 0,
            at_marker: false,
        }
    }

    fn fill(&mut self) {
        while self.nbits <= 56 && !self.at_marker {
            let Some(&byte) = self.data.get(self.pos) else {
                return;
            };
            if byte == 0xFF {
                match self.data.get(self.pos + 1) {
                    Some(0x00) => self.pos += 2,
                    _ => {
                        self.at_marker = true;
                        return;
                    }
                }
            } else {
                self.pos += 1;
            }
            self.acc = (self.acc << 8) | byte as u64;
            self.nbits += 8;
        }
    }

    pub(crate) fn bit(&mut self) -> Result<u32> {
        if self.nbits == 0 {
            self.fill();
            if self.nbits == 0 {
                return malformed("entropy-coded data ends prematurely");
            }
        }
        self.nbits -= 1;
        Ok(((self.acc >> self.nbits) & 1) as u32)
    }

    pub(crate) fn bits(&mut self, n: u32) -> Result<u32> {
        let mut v = 0;
        for _ in 0..n {
            v = (v << 1) | self.bit()?;
        }
        Ok(v)
    }

    /// Drops buffered padding bits and positions the reader on the next
    /// marker, skipping any stray bytes before it. Returns the marker code
    /// and the offset of its 0xFF prefix.
    pub(crate) fn seek_marker(&mut self) -> Result<(u8, usize)> {
        self.acc = 0;
        self.nbits = 0;
        self.at_marker = false;
        let data = self.data;
        let mut pos = self.pos;
        loop {
            if pos + 1 >= data.len() {
                return malformed("entropy-coded data is not terminated by a marker");
            }
            if data[pos] == 0xFF {
                let mut m = pos + 1;
                while m < data.len() && data[m] == 0xFF {
                    m += 1;
                }
                match data.get(m) {
                    None => return malformed("entropy-coded data is not terminated by a marker"),
                    Some(0x00) => pos = m + 1,
                    Some(&code) => {
                        self.pos = m + 1;
                        return Ok((code, m - 1));
                    }
                }
            } else {
                pos += 1;
            }
        }
    }

    /// Position just past the most recent marker found by [`seek_marker`].
    pub(crate) fn position(&self) -> usize {
        self.pos
    }
}

pub(crate) struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    pub(crate) fn new(out: Vec<u8>) -> Self {
        BitWriter {
            out,
            acc: 0,
            nbits: 0,
        }
    }

    pub(crate) fn put(&mut self, value: u32, len: u32) {
        debug_assert!(len <= 32);
        if len == 0 {
            return;
        }
        self.acc = (self.acc << len) | (value as u64 & ((1u64 << len) - 1));
        self.nbits += len;
        while self.nbits >= 8 {
            self.nbits -= 8;
            let byte = (self.acc >> self.nbits) as u8;
            self.out.push(byte);
            if byte == 0xFF {
                self.out.push(0x00);
            }
        }
        self.acc &= (1u64 << self.nbits) - 1;
    }

    /// Pads the final partial byte with one-bits.
    pub(crate) fn pad(&mut self) {
        if self.nbits > 0 {
            let fill = 8 - self.nbits;
            self.put((1 << fill) - 1, fill);
        }
    }

    pub(crate) fn marker(&mut self, code: u8) {
        debug_assert_eq!(self.nbits, 0);
        self.out.extend_from_slice(&[0xFF, code]);
    }

    pub(crate) fn finish(mut self) -> Vec<u8> {
        self.pad();
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stuffing_round_trip() {
        let mut w = BitWriter::new(Vec::new());
        w.put(0xFF, 8);
        w.put(0b101, 3);
        let mut bytes = w.finish();
        assert_eq!(bytes, vec![0xFF, 0x00, 0b1011_1111]);
        bytes.extend_from_slice(&[0xFF, 0xD9]);
        let mut r = BitReader::new(&bytes, 0);
        assert_eq!(r.bits(8).unwrap(), 0xFF);
        assert_eq!(r.bits(3).unwrap(), 0b101);
        assert_eq!(r.bits(5).unwrap(), 0b11111);
        assert!(r.bit().is_err());
        assert_eq!(r.seek_marker().unwrap(), (0xD9, 3));
    }

    #[test]
    fn reader_stops_at_marker() {
        let bytes = [0x80, 0xFF, 0xD0, 0x40];
        let mut r = BitReader::new(&bytes, 0);
        assert_eq!(r.bits(8).unwrap(), 0x80);
        assert!(r.bit().is_err());
        assert_eq!(r.seek_marker().unwrap().0, 0xD0);
        assert_eq!(r.position(), 3);
    }

    #[test]
    fn unterminated_data_is_malformed() {
        let bytes = [0x12, 0x34];
        let mut r = BitReader::new(&bytes, 0);
        assert!(r.seek_marker().is_err());
    }
}
