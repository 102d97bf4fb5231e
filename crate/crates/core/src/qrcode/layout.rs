//! Symbol geometry shared by the encoder and decoder: function patterns,
//! format-information placement, module placement order and masks.

use super::matrix::BitMatrix;
use super::EcLevel;

pub(crate) const FORMAT_XOR: u16 = 0x5412;
pub(crate) const FORMAT_GENERATOR: u16 = 0x537;

pub(crate) const PENALTY_N1: u32 = 3;
pub(crate) const PENALTY_N2: u32 = 3;
pub(crate) const PENALTY_N3: u32 = 40;
pub(crate) const PENALTY_N4: u32 = 10;

pub(crate) fn size_for(version: u8) -> usize {
    17 + 4 * version as usize
}

/// Center of the single alignment pattern, for versions 2 and 3.
pub(crate) fn alignment_center(version: u8) -> Option<usize> {
    (version >= 2).then(|| size_for(version) - 7)
}

/// Finder top-left corners: top-left, top-right, bottom-left.
pub(crate) fn finder_origins(size: usize) -> [(usize, usize); 3] {
    [(0, 0), (size - 7, 0), (0, size - 7)]
}

/// Expected module of a 7×7 finder at offset `(dx, dy)` from its corner.
pub(crate) fn finder_module(dx: usize, dy: usize) -> bool {
    let d = dx.abs_diff(3).max(dy.abs_diff(3));
    d != 2
}

/// Expected module of a 5×5 alignment pattern at offset from its center.
pub(crate) fn alignment_module(dx: isize, dy: isize) -> bool {
    dx.abs().max(dy.abs()) != 1
}

/// Draws every function pattern except the format bits (whose area is only
/// reserved) and returns the matrix with the function-module mask.
pub(crate) fn function_patterns(version: u8) -> (BitMatrix, BitMatrix) {
    let size = size_for(version);
    let mut m = BitMatrix::new(size);
    let mut func = BitMatrix::new(size);
    let mut put = |m: &mut BitMatrix, x: usize, y: usize, dark: bool| {
        m.set(x, y, dark);
        func.set(x, y, true);
    };

    for i in 0..size {
        put(&mut m, 6, i, i % 2 == 0);
        put(&mut m, i, 6, i % 2 == 0);
    }

    // Finders with their light separators.
    for (ox, oy) in finder_origins(size) {
        for dy in -1isize..=7 {
            for dx in -1isize..=7 {
                let (x, y) = (ox as isize + dx, oy as isize + dy);
                if x < 0 || y < 0 || x >= size as isize || y >= size as isize {
                    continue;
                }
                let inside = (0..7).contains(&dx) && (0..7).contains(&dy);
                let dark = inside && finder_module(dx as usize, dy as usize);
                put(&mut m, x as usize, y as usize, dark);
            }
        }
    }

    if let Some(c) = alignment_center(version) {
        for dy in -2isize..=2 {
            for dx in -2isize..=2 {
                let (x, y) = ((c as isize + dx) as usize, (c as isize + dy) as usize);
                put(&mut m, x, y, alignment_module(dx, dy));
            }
        }
    }

    for (a, b) in format_positions(size) {
        put(&mut m, a.0, a.1, false);
        put(&mut m, b.0, b.1, false);
    }
    // Dark module.
    put(&mut m, 8, size - 8, true);

    (m, func)
}

/// Positions of format bit `i` (LSB first) in the two copies.
pub(crate) fn format_positions(size: usize) -> [((usize, usize), (usize, usize)); 15] {
    let mut out = [((0, 0), (0, 0)); 15];
    for (i, slot) in out.iter_mut().enumerate() {
        let first = match i {
            0..=5 => (8, i),
            6 => (8, 7),
            7 => (8, 8),
            8 => (7, 8),
            _ => (14 - i, 8),
        };
        let second = if i < 8 {
            (size - 1 - i, 8)
        } else {
            (8, size - 15 + i)
        };
        *slot = (first, second);
    }
    out
}

fn level_bits(level: EcLevel) -> u16 {
    match level {
        EcLevel::L => 0b01,
        EcLevel::M => 0b00,
    }
}

/// BCH(15,5) remainder of a 5-bit value.
fn bch_remainder(data: u16) -> u16 {
    let mut rem = data << 10;
    for bit in (10..15).rev() {
        if rem & (1 << bit) != 0 {
            rem ^= FORMAT_GENERATOR << (bit - 10);
        }
    }
    rem
}

/// The 15 format bits for `(level, mask)`, already XORed with the format mask.
pub fn format_bits(level: EcLevel, mask: u8) -> u16 {
    let data = (level_bits(level) << 3) | u16::from(mask);
    ((data << 10) | bch_remainder(data)) ^ FORMAT_XOR
}

/// Nearest valid format word: `(level, mask, hamming distance)`. Level codes
/// for Q and H decode to `None` for the level.
pub(crate) fn decode_format_bits(bits: u16) -> (Option<EcLevel>, u8, u32) {
    let mut best = (None, 0, u32::MAX);
    for data in 0u16..32 {
        let word = ((data << 10) | bch_remainder(data)) ^ FORMAT_XOR;
        let dist = (word ^ bits).count_ones();
        if dist < best.2 {
            let level = match data >> 3 {
                0b01 => Some(EcLevel::L),
                0b00 => Some(EcLevel::M),
                _ => None,
            };
            best = (level, (data & 7) as u8, dist);
        }
    }
    best
}

pub(crate) fn draw_format_bits(m: &mut BitMatrix, level: EcLevel, mask: u8) {
    let bits = format_bits(level, mask);
    for (i, (a, b)) in format_positions(m.size()).into_iter().enumerate() {
        let dark = (bits >> i) & 1 == 1;
        m.set(a.0, a.1, dark);
        m.set(b.0, b.1, dark);
    }
}

/// Non-function modules in placement order: two-column strips from the right,
/// alternating upward and downward, skipping the vertical timing column.
pub(crate) fn data_positions(func: &BitMatrix) -> Vec<(usize, usize)> {
    let size = func.size();
    let mut out = Vec::with_capacity(size * size);
    let mut right = size as isize - 1;
    while right >= 1 {
        if right == 6 {
            right = 5;
        }
        let upward = (right + 1) & 2 == 0;
        for vert in 0..size {
            let y = if upward { size - 1 - vert } else { vert };
            for j in 0..2 {
                let x = (right - j) as usize;
                if !func.get(x, y) {
                    out.push((x, y));
                }
            }
        }
        right -= 2;
    }
    out
}

#[inline]
pub(crate) fn mask_bit(mask: u8, x: usize, y: usize) -> bool {
    match mask {
        0 => (x + y) % 2 == 0,
        1 => y % 2 == 0,
        2 => x % 3 == 0,
        3 => (x + y) % 3 == 0,
        4 => (x / 3 + y / 2) % 2 == 0,
        5 => x * y % 2 + x * y % 3 == 0,
        6 => (x * y % 2 + x * y % 3) % 2 == 0,
        7 => ((x + y) % 2 + x * y % 3) % 2 == 0,
        _ => unreachable!("mask {mask} out of range"),
    }
}

pub(crate) fn apply_mask(m: &mut BitMatrix, func: &BitMatrix, mask: u8) {
    for y in 0..m.size() {
        for x in 0..m.size() {
            if !func.get(x, y) && mask_bit(mask, x, y) {
                m.toggle(x, y);
            }
        }
    }
}

/// Penalty score used to pick a mask: long runs, 2×2 blocks, finder-like
/// sequences and dark/light imbalance.
pub fn penalty(m: &BitMatrix) -> u32 {
    let n = m.size();
    let mut score = 0;

    let lines = |horizontal: bool| -> Vec<Vec<bool>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if horizontal { m.get(j, i) } else { m.get(i, j) })
                    .collect()
            })
            .collect()
    };
    let all_lines: Vec<Vec<bool>> = lines(true).into_iter().chain(lines(false)).collect();

    for line in &all_lines {
        let mut run = 1;
        for j in 1..=n {
            if j < n && line[j] == line[j - 1] {
                run += 1;
            } else {
                if run >= 5 {
                    score += PENALTY_N1 + (run - 5) as u32;
                }
                run = 1;
            }
        }
    }

    for y in 0..n - 1 {
        for x in 0..n - 1 {
            let c = m.get(x, y);
            if c == m.get(x + 1, y) && c == m.get(x, y + 1) && c == m.get(x + 1, y + 1) {
                score += PENALTY_N2;
            }
        }
    }

    // 1:1:3:1:1 dark/light pattern with four light modules on at least one
    // side, scored once per occurrence; modules outside the symbol count as
    // light.
    const CORE: [bool; 7] = [true, false, true, true, true, false, true];
    for line in &all_lines {
        let at = |i: isize| i >= 0 && (i as usize) < n && line[i as usize];
        for start in 0..=(n - 7) as isize {
            if (0..7).any(|k| at(start + k) != CORE[k as usize]) {
                continue;
            }
            let light_before = (1..=4).all(|k| !at(start - k));
            let light_after = (0..4).all(|k| !at(start + 7 + k));
            if light_before || light_after {
                score += PENALTY_N3;
            }
        }
    }

    let total = (n * n) as i64;
    let dark = m.dark_count() as i64;
    // Whole 5% steps away from half dark.
    let k = (dark * 20 - total * 10).abs() / total;
    score += k as u32 * PENALTY_N4;
    score
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_bits_known_values() {
        // Values from the standard's format-information table.
        assert_eq!(format_bits(EcLevel::M, 0), 0b101010000010010);
        assert_eq!(format_bits(EcLevel::L, 0), 0b111011111000100);
        assert_eq!(format_bits(EcLevel::L, 7), 0b110100101110110);
        assert_eq!(format_bits(EcLevel::M, 5), 0b100000011001110);
    }

    #[test]
    fn format_bits_round_trip_all_32_words() {
        for data in 0u16..32 {
            let word = ((data << 10) | bch_remainder(data)) ^ FORMAT_XOR;
            let (level, mask, dist) = decode_format_bits(word);
            assert_eq!(dist, 0);
            assert_eq!(mask, (data & 7) as u8);
            let expected = match data >> 3 {
                1 => Some(EcLevel::L),
                0 => Some(EcLevel::M),
                _ => None,
            };
            assert_eq!(level, expected);
        }
    }

    #[test]
    fn format_words_are_distance_seven_apart() {
        let words: Vec<u16> = (0u16..32)
            .map(|d| ((d << 10) | bch_remainder(d)) ^ FORMAT_XOR)
            .collect();
        for i in 0..32 {
            for j in i + 1..32 {
                assert!((words[i] ^ words[j]).count_ones() >= 7);
            }
        }
    }

    #[test]
    fn three_flipped_format_bits_still_decode() {
        let word = format_bits(EcLevel::L, 3) ^ 0b100_0000_1000_0001;
        assert_eq!(decode_format_bits(word), (Some(EcLevel::L), 3, 3));
    }

    #[test]
    fn data_capacity_in_modules() {
        for (version, raw) in [(1u8, 208usize), (2, 359), (3, 567)] {
            let (_, func) = function_patterns(version);
            let positions = data_positions(&func);
            assert_eq!(positions.len(), raw, "version {version}");
            let mut seen = std::collections::HashSet::new();
            assert!(positions.iter().all(|p| seen.insert(*p)));
        }
    }

    #[test]
    fn dark_module_and_timing() {
        let (m, _) = function_patterns(2);
        assert!(m.get(8, 25 - 8));
        for i in 8..17 {
            assert_eq!(m.get(6, i), i % 2 == 0);
            assert_eq!(m.get(i, 6), i % 2 == 0);
        }
        // Alignment pattern centered at (18, 18).
        assert!(m.get(18, 18));
        assert!(!m.get(17, 18));
        assert!(m.get(16, 18));
    }

    #[test]
    fn mask_patterns_at_origin_neighbourhood() {
        // Row 0, columns 0..6 of each mask pattern.
        let expected = [
            "#.#.#.", "######", "#..#..", "#..#..", "###...", "######", "######", "#.#.#.",
        ];
        for (mask, row) in expected.iter().enumerate() {
            let got: String = (0..6)
                .map(|x| if mask_bit(mask as u8, x, 0) { '#' } else { '.' })
                .collect();
            assert_eq!(&got, row, "mask {mask}");
        }
        // Row 1 distinguishes 3 from 2 and 7 from 0.
        assert!(mask_bit(3, 2, 1) && !mask_bit(2, 2, 1));
        assert_ne!(mask_bit(7, 1, 1), mask_bit(0, 1, 1));
    }

    #[test]
    fn penalty_of_uniform_matrix() {
        // 21×21 all light: 42 runs of 21 → 42·(3+16); 400 blocks → 1200;
        // no finder-like core; 100% light → k = 10 → 100.
        let m = BitMatrix::new(21);
        assert_eq!(penalty(&m), 42 * 19 + 400 * 3 + 100);
    }
}
