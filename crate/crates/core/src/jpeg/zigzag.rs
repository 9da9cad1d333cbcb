//! T.81 zigzag scan order.

/// Natural (row-major) position of each zigzag index.
pub const ZIGZAG_TO_NATURAL: [u8; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27, 20,
    13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58, 59,
    52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];

/// Zigzag index of each natural (row-major) position.
pub const NATURAL_TO_ZIGZAG: [u8; 64] = invert(&ZIGZAG_TO_NATURAL);

const fn invert(table: &[u8; 64]) -> [u8; 64] {
    let mut out = [0u8; 64];
    let mut i = 0;
    while i < 64 {
        out[table[i] as usize] = i as u8;
        i += 1;
    }
    out
}

/// Maps a zigzag index to its `(row, col)` position in the 8×8 block.
///
/// Panics if `index > 63`.
pub fn zigzag_to_natural(index: usize) -> (usize, usize) {
    let natural = ZIGZAG_TO_NATURAL[index] as usize;
    (natural / 8, natural % 8)
}

/// Inverse of [`zigzag_to_natural`].
pub fn natural_to_zigzag(row: usize, col: usize) -> usize {
    assert!(row < 8 && col < 8, "block position out of range");
    NATURAL_TO_ZIGZAG[row * 8 + col] as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_positions() {
        assert_eq!(zigzag_to_natural(0), (0, 0));
        assert_eq!(zigzag_to_natural(1), (0, 1));
        assert_eq!(zigzag_to_natural(2), (1, 0));
        assert_eq!(zigzag_to_natural(63), (7, 7));
    }

    #[test]
    fn bijection() {
        let mut seen = [false; 64];
        for i in 0..64 {
            let (r, c) = zigzag_to_natural(i);
            assert!(!seen[r * 8 + c]);
            seen[r * 8 + c] = true;
            assert_eq!(natural_to_zigzag(r, c), i);
        }
        assert!(seen.iter().all(|&s| s));
    }

    // Independent construction: walk the anti-diagonals, alternating direction.
    #[test]
    fn matches_diagonal_walk() {
        let mut order = Vec::with_capacity(64);
        for s in 0..15usize {
            let cells: Vec<(usize, usize)> = (0..=s)
                .filter(|&r| r < 8 && s - r < 8)
                .map(|r| (r, s - r))
                .collect();
            if s % 2 == 0 {
                order.extend(cells.iter().rev());
            } else {
                order.extend(cells.iter());
            }
        }
        for (i, &(r, c)) in order.iter().enumerate() {
            assert_eq!(zigzag_to_natural(i), (r, c), "zigzag index {i}");
        }
    }

    #[test]
    #[should_panic]
    fn out_of_range_panics() {
        zigzag_to_natural(64);
    }
}
