//! Huffman table definitions, canonical code construction, and the
//! statistics-driven table builder used when a modified image needs symbols
//! the original tables cannot express.

use super::error::{malformed, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableClass {
    Dc,
    Ac,
}

impl TableClass {
    pub(crate) fn from_bits(tc: u8) -> Option<Self> {
        match tc {
            0 => Some(TableClass::Dc),
            1 => Some(TableClass::Ac),
            _ => None,
        }
    }

    pub(crate) fn bits(self) -> u8 {
        match self {
            TableClass::Dc => 0,
            TableClass::Ac => 1,
        }
    }
}

/// A DHT table: 16 code-length counts plus the symbols in code order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTable {
    class: TableClass,
    counts: [u8; 16],
    symbols: Vec<u8>,
}

impl HuffmanTable {
    /// Validates canonical-code feasibility before accepting the table.
    pub fn new(class: TableClass, counts: [u8; 16], symbols: Vec<u8>) -> Result<Self> {
        let total: usize = counts.iter().map(|&c| c as usize).sum();
        if total > 256 {
            return malformed(format!("Huffman table declares {total} symbols"));
        }
        if total != symbols.len() {
            return malformed(format!(
                "Huffman table declares {total} symbols but lists {}",
                symbols.len()
            ));
        }
        if class == TableClass::Dc && symbols.iter().any(|&s| s > 15) {
            return malformed("DC Huffman symbol exceeds category 15");
        }
        let mut code: u32 = 0;
        for (i, &n) in counts.iter().enumerate() {
            code += n as u32;
            if code > 1 << (i + 1) {
                return malformed(format!("Huffman code space overfull at length {}", i + 1));
            }
            code <<= 1;
        }
        Ok(HuffmanTable {
            class,
            counts,
            symbols,
        })
    }

    pub fn class(&self) -> TableClass {
        self.class
    }

    pub fn counts(&self) -> &[u8; 16] {
        &self.counts
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Canonical `(symbol, code, length)` triples in code order.
    pub fn codes(&self) -> Vec<(u8, u16, u8)> {
        let mut out = Vec::with_capacity(self.symbols.len());
        let mut code: u32 = 0;
        let mut k = 0;
        for len in 1..=16u8 {
            for _ in 0..self.counts[len as usize - 1] {
                out.push((self.symbols[k], code as u16, len));
                code += 1;
                k += 1;
            }
            code <<= 1;
        }
        out
    }

    pub fn contains(&self, symbol: u8) -> bool {
        self.symbols.contains(&symbol)
    }

    /// Builds a length-limited optimal table from symbol frequencies
    /// (ITU-T T.81 Annex K.2). A reserved pseudo-symbol keeps the all-ones
    /// codeword unused.
    pub fn from_frequencies(class: TableClass, freq: &[u64; 256]) -> Self {
        const MAX_LEN: usize = 32;
        let mut f = [0u64; 257];
        f[..256].copy_from_slice(freq);
        f[256] = 1;
        let mut code_size = [0usize; 257];
        let mut others = [usize::MAX; 257];

        if freq.iter().all(|&x| x == 0) {
            // Nothing to code; a single one-bit code keeps the table valid.
            let mut counts = [0u8; 16];
            counts[0] = 1;
            return HuffmanTable {
                class,
                counts,
                symbols: vec![0],
            };
        }

        loop {
            // Least frequency wins; ties go to the larger symbol value.
            let mut c1 = None;
            let mut v = u64::MAX;
            for (i, &x) in f.iter().enumerate() {
                if x > 0 && x <= v {
                    v = x;
                    c1 = Some(i);
                }
            }
            let c1 = c1.expect("at least one live symbol");
            let mut c2 = None;
            let mut v = u64::MAX;
            for (i, &x) in f.iter().enumerate() {
                if x > 0 && x <= v && i != c1 {
                    v = x;
                    c2 = Some(i);
                }
            }
            let Some(c2) = c2 else { break };

            f[c1] += f[c2];
            f[c2] = 0;
            let mut c = c1;
            code_size[c] += 1;
            while others[c] != usize::MAX {
                c = others[c];
                code_size[c] += 1;
            }
            others[c] = c2;
            let mut c = c2;
            code_size[c] += 1;
            while others[c] != usize::MAX {
                c = others[c];
                code_size[c] += 1;
            }
        }

        let mut bits = [0usize; MAX_LEN + 1];
        for &size in &code_size {
            if size > 0 {
                assert!(size <= MAX_LEN, "Huffman code length overflow");
                bits[size] += 1;
            }
        }
        // Limit code lengths to 16 bits.
        for i in (17..=MAX_LEN).rev() {
            while bits[i] > 0 {
                let mut j = i - 2;
                while bits[j] == 0 {
                    j -= 1;
                }
                bits[i] -= 2;
                bits[i - 1] += 1;
                bits[j + 1] += 2;
                bits[j] -= 1;
            }
        }
        // Drop the reserved pseudo-symbol from the longest length.
        let mut i = 16;
        while bits[i] == 0 {
            i -= 1;
        }
        bits[i] -= 1;

        let mut symbols = Vec::new();
        for len in 1..=MAX_LEN {
            for (sym, &size) in code_size.iter().enumerate().take(256) {
                if size == len {
                    symbols.push(sym as u8);
                }
            }
        }
        let mut counts = [0u8; 16];
        for (len, count) in counts.iter_mut().enumerate() {
            *count = bits[len + 1] as u8;
        }
        HuffmanTable {
            class,
            counts,
            symbols,
        }
    }
}

/// Canonical decoder (T.81 Annex F.2.2.3).
#[derive(Debug, Clone)]
pub(crate) struct HuffmanDecoder {
    max_code: [i32; 17],
    min_code: [i32; 17],
    val_ptr: [usize; 17],
    symbols: Vec<u8>,
}

impl HuffmanDecoder {
    pub(crate) fn new(table: &HuffmanTable) -> Self {
        let mut max_code = [-1i32; 17];
        let mut min_code = [0i32; 17];
        let mut val_ptr = [0usize; 17];
        let mut code = 0i32;
        let mut k = 0usize;
        for len in 1..=16 {
            let n = table.counts[len - 1] as usize;
            val_ptr[len] = k;
            min_code[len] = code;
            code += n as i32;
            k += n;
            if n > 0 {
                max_code[len] = code - 1;
            }
            code <<= 1;
        }
        HuffmanDecoder {
            max_code,
            min_code,
            val_ptr,
            symbols: table.symbols.clone(),
        }
    }

    pub(crate) fn decode(&self, mut next_bit: impl FnMut() -> Result<u32>) -> Result<u8> {
        let mut code = next_bit()? as i32;
        for len in 1..=16 {
            if code <= self.max_code[len] {
                let idx = self.val_ptr[len] + (code - self.min_code[len]) as usize;
                return Ok(self.symbols[idx]);
            }
            code = (code << 1) | next_bit()? as i32;
        }
        malformed("invalid Huffman code in entropy data")
    }
}

/// Symbol → (code, length) lookup; length 0 marks an absent symbol.
#[derive(Debug, Clone)]
pub(crate) struct HuffmanEncoder {
    code: [u16; 256],
    len: [u8; 256],
}

impl HuffmanEncoder {
    pub(crate) fn new(table: &HuffmanTable) -> Self {
        let mut code = [0u16; 256];
        let mut len = [0u8; 256];
        for (sym, c, l) in table.codes() {
            // First definition wins if a symbol is listed twice.
            if len[sym as usize] == 0 {
                code[sym as usize] = c;
                len[sym as usize] = l;
            }
        }
        HuffmanEncoder { code, len }
    }

    pub(crate) fn lookup(&self, symbol: u8) -> Option<(u16, u8)> {
        let l = self.len[symbol as usize];
        (l > 0).then(|| (self.code[symbol as usize], l))
    }
}

/// Magnitude category (number of extra bits) of a coefficient value.
pub(crate) fn category(value: i32) -> u32 {
    32 - value.unsigned_abs().leading_zeros()
}

/// T.81 EXTEND: maps `bits` (an `s`-bit field) to a signed value.
pub(crate) fn extend(bits: u32, s: u32) -> i32 {
    if s == 0 {
        0
    } else if bits < (1 << (s - 1)) {
        bits as i32 - (1 << s) + 1
    } else {
        bits as i32
    }
}

/// Inverse of [`extend`]: the `s` low bits that encode `value`.
pub(crate) fn magnitude_bits(value: i32, s: u32) -> u32 {
    if value < 0 {
        (value - 1) as u32 & ((1u32 << s) - 1)
    } else {
        value as u32
    }
}
