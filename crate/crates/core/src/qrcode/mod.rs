//! QR Model 2 symbols, versions 1–3, error-correction levels L and M, byte mode.
//!
//! Every supported (version, level) pair uses a single Reed–Solomon block, so
//! there is no codeword interleaving. The decoder takes a clean module grid in
//! any of the eight square orientations; camera sampling is not handled here.

pub mod gf;
mod layout;
mod matrix;
pub mod rs;

pub use gf::{gf_div, gf_inv, gf_mul, gf_pow, GfError};
pub use layout::{format_bits, penalty};
pub use matrix::{BitMatrix, MatrixParseError, Symmetry};
pub use rs::{rs_correct, rs_encode, RsError};

use layout::{
    alignment_center, alignment_module, apply_mask, data_positions, decode_format_bits,
    draw_format_bits, finder_module, finder_origins, format_positions, function_patterns,
    size_for,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_VERSION: u8 = 1;
pub const MAX_VERSION: u8 = 3;

const MODE_BYTE: u32 = 0b0100;
const PAD_BYTES: [u8; 2] = [0xEC, 0x11];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EcLevel {
    L,
    M,
}

impl EcLevel {
    pub const ALL: [EcLevel; 2] = [EcLevel::L, EcLevel::M];
}

impl std::str::FromStr for EcLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L" | "l" => Ok(EcLevel::L),
            "M" | "m" => Ok(EcLevel::M),
            other => Err(format!("unsupported error-correction level {other:?} (use L or M)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QrSymbolConfig {
    pub version: u8,
    pub ec_level: EcLevel,
    pub mask: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsBlockShape {
    pub total_codewords: usize,
    pub data_codewords: usize,
    pub ec_codewords: usize,
}

impl RsBlockShape {
    /// Byte errors the block can correct.
    pub fn correctable(&self) -> usize {
        self.ec_codewords / 2
    }

    /// Longest byte-mode payload: data codewords minus the 4-bit mode and
    /// 8-bit count header, rounded down to whole bytes.
    pub fn byte_capacity(&self) -> usize {
        self.data_codewords - 2
    }
}

/// Single-block shape for a supported `(version, level)`.
pub fn block_shape(version: u8, level: EcLevel) -> Option<RsBlockShape> {
    let (total, ec) = match (version, level) {
        (1, EcLevel::L) => (26, 7),
        (1, EcLevel::M) => (26, 10),
        (2, EcLevel::L) => (44, 10),
        (2, EcLevel::M) => (44, 16),
        (3, EcLevel::L) => (70, 15),
        (3, EcLevel::M) => (70, 26),
        _ => return None,
    };
    Some(RsBlockShape {
        total_codewords: total,
        data_codewords: total - ec,
        ec_codewords: ec,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub payload: Vec<u8>,
    pub corrected_errors: usize,
    /// The symmetry the scanned grid had relative to the upright symbol.
    pub orientation_applied: Symmetry,
    pub config: QrSymbolConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QrError {
    #[error("payload of {len} bytes exceeds the {capacity}-byte capacity")]
    PayloadTooLarge { len: usize, capacity: usize },
    #[error("forced configuration rejected: {0}")]
    BadForcedConfig(String),
    #[error("matrix size {0} is not a version 1-3 symbol (21, 25 or 29)")]
    UnsupportedSize(usize),
    #[error("no orientation puts finder patterns at three corners")]
    NoFinderOrientation,
    #[error("format information unreadable")]
    BadFormatInfo,
    #[error("too many errors to correct")]
    Uncorrectable,
    #[error("malformed bit stream: {0}")]
    MalformedBitstream(String),
}

struct BitBuffer {
    bytes: Vec<u8>,
    len: usize,
}

impl BitBuffer {
    fn new() -> Self {
        BitBuffer {
            bytes: Vec::new(),
            len: 0,
        }
    }

    fn push(&mut self, value: u32, width: usize) {
        for i in (0..width).rev() {
            if self.len % 8 == 0 {
                self.bytes.push(0);
            }
            if (value >> i) & 1 == 1 {
                *self.bytes.last_mut().unwrap() |= 0x80 >> (self.len % 8);
            }
            self.len += 1;
        }
    }
}

/// Data codewords: mode, count, payload, terminator, zero bits to a byte
/// boundary, then alternating pad bytes.
fn data_codewords(payload: &[u8], shape: &RsBlockShape) -> Vec<u8> {
    let capacity_bits = shape.data_codewords * 8;
    let mut bb = BitBuffer::new();
    bb.push(MODE_BYTE, 4);
    bb.push(payload.len() as u32, 8);
    for &b in payload {
        bb.push(u32::from(b), 8);
    }
    let terminator = (capacity_bits - bb.len).min(4);
    bb.push(0, terminator);
    bb.push(0, (8 - bb.len % 8) % 8);
    let mut out = bb.bytes;
    let mut pad = PAD_BYTES.iter().cycle();
    while out.len() < shape.data_codewords {
        out.push(*pad.next().unwrap());
    }
    out
}

/// Encodes `payload` in byte mode.
///
/// Without `forced`, the smallest version that fits is used and the mask with
/// the lowest penalty is chosen (lowest index on ties). `forced` pins
/// `(version, mask)`.
pub fn encode_symbol(
    payload: &[u8],
    level: EcLevel,
    forced: Option<(u8, u8)>,
) -> Result<(BitMatrix, QrSymbolConfig), QrError> {
    let largest = block_shape(MAX_VERSION, level).unwrap().byte_capacity();
    let version = match forced {
        Some((v, m)) => {
            if !(MIN_VERSION..=MAX_VERSION).contains(&v) {
                return Err(QrError::BadForcedConfig(format!("version {v} not in 1..=3")));
            }
            if m > 7 {
                return Err(QrError::BadForcedConfig(format!("mask {m} not in 0..=7")));
            }
            let cap = block_shape(v, level).unwrap().byte_capacity();
            if payload.len() > cap {
                return Err(QrError::PayloadTooLarge {
                    len: payload.len(),
                    capacity: cap,
                });
            }
            v
        }
        None => (MIN_VERSION..=MAX_VERSION)
            .find(|&v| payload.len() <= block_shape(v, level).unwrap().byte_capacity())
            .ok_or(QrError::PayloadTooLarge {
                len: payload.len(),
                capacity: largest,
            })?,
    };
    let shape = block_shape(version, level).unwrap();

    let mut codewords = data_codewords(payload, &shape);
    let parity = rs_encode(&codewords, shape.ec_codewords).expect("block shape is valid");
    codewords.extend(parity);

    let (mut base, func) = function_patterns(version);
    let positions = data_positions(&func);
    for (i, &(x, y)) in positions.iter().take(codewords.len() * 8).enumerate() {
        base.set(x, y, (codewords[i / 8] >> (7 - i % 8)) & 1 == 1);
    }

    let render = |mask: u8| {
        let mut m = base.clone();
        apply_mask(&mut m, &func, mask);
        draw_format_bits(&mut m, level, mask);
        m
    };
    let (matrix, mask) = match forced {
        Some((_, mask)) => (render(mask), mask),
        None => (0..8u8)
            .map(|mask| (render(mask), mask))
            .min_by_key(|(m, mask)| (penalty(m), *mask))
            .unwrap(),
    };
    Ok((
        matrix,
        QrSymbolConfig {
            version,
            ec_level: level,
            mask,
        },
    ))
}

/// Mismatching modules of the three finders (with separators) and, for
/// versions 2–3, the alignment pattern. `None` if any pattern is too damaged.
fn orientation_score(m: &BitMatrix, version: u8) -> Option<usize> {
    const FINDER_TOLERANCE: usize = 3;
    const ALIGNMENT_TOLERANCE: usize = 2;
    let size = m.size();
    let mut total = 0;
    for (ox, oy) in finder_origins(size) {
        let bad = (0..7)
            .flat_map(|dy| (0..7).map(move |dx| (dx, dy)))
            .filter(|&(dx, dy)| m.get(ox + dx, oy + dy) != finder_module(dx, dy))
            .count();
        if bad > FINDER_TOLERANCE {
            return None;
        }
        total += bad;
    }
    if let Some(c) = alignment_center(version) {
        let bad = (-2isize..=2)
            .flat_map(|dy| (-2isize..=2).map(move |dx| (dx, dy)))
            .filter(|&(dx, dy)| {
                let (x, y) = ((c as isize + dx) as usize, (c as isize + dy) as usize);
                m.get(x, y) != alignment_module(dx, dy)
            })
            .count();
        if bad > ALIGNMENT_TOLERANCE {
            return None;
        }
        total += bad;
    }
    Some(total)
}

/// Best of the two format copies: `(level, mask, distance)`.
fn read_format(m: &BitMatrix) -> Result<(EcLevel, u8, u32), QrError> {
    const MAX_FORMAT_ERRORS: u32 = 3;
    let positions = format_positions(m.size());
    let word = |pick: fn(&((usize, usize), (usize, usize))) -> (usize, usize)| -> u16 {
        positions.iter().enumerate().fold(0u16, |acc, (i, p)| {
            let (x, y) = pick(p);
            acc | (u16::from(m.get(x, y)) << i)
        })
    };
    let first = decode_format_bits(word(|p| p.0));
    let second = decode_format_bits(word(|p| p.1));
    let best = if second.2 < first.2 { second } else { first };
    match best {
        (Some(level), mask, dist) if dist <= MAX_FORMAT_ERRORS => Ok((level, mask, dist)),
        _ => Err(QrError::BadFormatInfo),
    }
}

struct Candidate {
    payload: Vec<u8>,
    corrected: usize,
    config: QrSymbolConfig,
}

/// Decodes an upright symbol.
fn decode_upright(m: &BitMatrix, version: u8) -> Result<Candidate, QrError> {
    let (level, mask, _) = read_format(m)?;
    let shape = block_shape(version, level).unwrap();
    let (_, func) = function_patterns(version);
    let positions = data_positions(&func);

    let mut codewords = vec![0u8; shape.total_codewords];
    for (i, &(x, y)) in positions.iter().take(shape.total_codewords * 8).enumerate() {
        let bit = m.get(x, y) ^ layout::mask_bit(mask, x, y);
        if bit {
            codewords[i / 8] |= 0x80 >> (i % 8);
        }
    }

    let (data, corrected) = rs_correct(&codewords, shape.ec_codewords).map_err(|e| match e {
        RsError::Uncorrectable => QrError::Uncorrectable,
        other => QrError::MalformedBitstream(other.to_string()),
    })?;

    let mode = data[0] >> 4;
    if u32::from(mode) != MODE_BYTE {
        return Err(QrError::MalformedBitstream(format!(
            "mode indicator {mode:04b} is not byte mode"
        )));
    }
    let count = usize::from(((data[0] & 0x0F) << 4) | (data[1] >> 4));
    if 12 + 8 * count > shape.data_codewords * 8 {
        return Err(QrError::MalformedBitstream(format!(
            "character count {count} exceeds the symbol capacity"
        )));
    }
    let payload = (0..count)
        .map(|i| (data[1 + i] << 4) | (data[2 + i] >> 4))
        .collect();
    Ok(Candidate {
        payload,
        corrected,
        config: QrSymbolConfig {
            version,
            ec_level: level,
            mask,
        },
    })
}

/// Decodes a symbol presented in any of the eight orientations.
///
/// Every orientation whose finder (and alignment) patterns sit where an upright
/// symbol has them is decoded; identity and transpose always both qualify. The
/// successful reading with the cleanest format information and then the
/// fewest corrections wins.
pub fn decode_symbol(matrix: &BitMatrix) -> Result<DecodeReport, QrError> {
    let version = matrix
        .version()
        .ok_or(QrError::UnsupportedSize(matrix.size()))?;

    let mut attempts: Vec<(u32, usize, Symmetry, Result<Candidate, QrError>)> = Vec::new();
    for sym in Symmetry::ALL {
        let upright = matrix.transformed(sym.inverse());
        let Some(pattern_errors) = orientation_score(&upright, version) else {
            continue;
        };
        let format_dist = read_format(&upright).map_or(u32::MAX, |(_, _, d)| d);
        attempts.push((format_dist, pattern_errors, sym, decode_upright(&upright, version)));
    }
    if attempts.is_empty() {
        return Err(QrError::NoFinderOrientation);
    }
    attempts.sort_by_key(|(format_dist, pattern_errors, _, result)| {
        (
            result.is_err(),
            *format_dist,
            result.as_ref().map_or(usize::MAX, |c| c.corrected),
            *pattern_errors,
        )
    });
    let (_, _, sym, result) = attempts.swap_remove(0);
    let c = result?;
    Ok(DecodeReport {
        payload: c.payload,
        corrected_errors: c.corrected,
        orientation_applied: sym,
        config: c.config,
    })
}

/// Grid positions of every module belonging to data codeword `index` in an
/// upright symbol of `version`. Used to inject byte errors in tests.
pub fn codeword_modules(version: u8, index: usize) -> Vec<(usize, usize)> {
    let (_, func) = function_patterns(version);
    data_positions(&func)
        .into_iter()
        .skip(index * 8)
        .take(8)
        .collect()
}

/// Side length of a `version` symbol.
pub fn symbol_size(version: u8) -> usize {
    size_for(version)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacities() {
        let expected = [
            (1, EcLevel::L, 19, 7),
            (1, EcLevel::M, 16, 10),
            (2, EcLevel::L, 34, 10),
            (2, EcLevel::M, 28, 16),
            (3, EcLevel::L, 55, 15),
            (3, EcLevel::M, 44, 26),
        ];
        for (v, l, data, ec) in expected {
            let s = block_shape(v, l).unwrap();
            assert_eq!((s.data_codewords, s.ec_codewords), (data, ec));
            assert_eq!(s.byte_capacity(), data - 2);
            assert!(s.correctable() >= 2);
        }
        assert_eq!(block_shape(4, EcLevel::L), None);
    }

    #[test]
    fn staff_payload_selects_version_two_at_m() {
        let (m, cfg) = encode_symbol(b"HCTIS1|ENG|1|N07|S1042", EcLevel::M, None).unwrap();
        assert_eq!(cfg.version, 2);
        assert_eq!(m.size(), 25);
    }

    #[test]
    fn finder_patterns_at_three_corners() {
        let (m, _) = encode_symbol(b"abc", EcLevel::L, None).unwrap();
        let n = m.size();
        for (ox, oy) in [(0, 0), (n - 7, 0), (0, n - 7)] {
            for dy in 0..7 {
                for dx in 0..7 {
                    let border = dx == 0 || dy == 0 || dx == 6 || dy == 6;
                    let core = (2..5).contains(&dx) && (2..5).contains(&dy);
                    assert_eq!(m.get(ox + dx, oy + dy), border || core, "({dx},{dy})");
                }
            }
        }
        // Fourth corner holds no finder.
        assert!(orientation_score(&m.transformed(Symmetry::Rot180), 1).is_none());
    }

    #[test]
    fn data_codeword_layout() {
        let shape = block_shape(1, EcLevel::M).unwrap();
        let cw = data_codewords(b"ab", &shape);
        // 0100 00000010 01100001 01100010 0000 then pads.
        assert_eq!(&cw[..4], &[0x40, 0x26, 0x16, 0x20]);
        assert_eq!(&cw[4..8], &[0xEC, 0x11, 0xEC, 0x11]);
        assert_eq!(cw.len(), 16);
        // Full symbol: no room for the terminator beyond what fits.
        let full = data_codewords(&[0xFF; 14], &shape);
        assert_eq!(full.len(), 16);
        assert_eq!(full[15], 0xF0);
    }

    #[test]
    fn forced_config_errors() {
        assert!(matches!(
            encode_symbol(b"x", EcLevel::L, Some((4, 0))),
            Err(QrError::BadForcedConfig(_))
        ));
        assert!(matches!(
            encode_symbol(b"x", EcLevel::L, Some((1, 8))),
            Err(QrError::BadForcedConfig(_))
        ));
        assert_eq!(
            encode_symbol(&[0; 15], EcLevel::M, Some((1, 0))).unwrap_err(),
            QrError::PayloadTooLarge {
                len: 15,
                capacity: 14
            }
        );
        assert_eq!(
            encode_symbol(&[0; 43], EcLevel::M, None).unwrap_err(),
            QrError::PayloadTooLarge {
                len: 43,
                capacity: 42
            }
        );
    }

    #[test]
    fn round_trip_every_orientation() {
        let payload = b"HCTIS1|ENG|1|N07|S1042";
        let (m, cfg) = encode_symbol(payload, EcLevel::M, None).unwrap();
        for sym in Symmetry::ALL {
            let r = decode_symbol(&m.transformed(sym)).unwrap();
            assert_eq!(r.payload, payload);
            assert_eq!(r.orientation_applied, sym);
            assert_eq!(r.config, cfg);
            assert_eq!(r.corrected_errors, 0);
        }
    }

    #[test]
    fn decode_errors() {
        assert_eq!(
            decode_symbol(&BitMatrix::new(22)).unwrap_err(),
            QrError::UnsupportedSize(22)
        );
        assert_eq!(
            decode_symbol(&BitMatrix::new(21)).unwrap_err(),
            QrError::NoFinderOrientation
        );

        let (m, _) = encode_symbol(b"abc", EcLevel::L, Some((1, 2))).unwrap();
        // A transposed reading sees the format word bit-reversed, so the
        // replacement word has to be far from every codeword both ways.
        let far = |w: u16| decode_format_bits(w).2 > 3;
        let junk = (0u16..1 << 15)
            .find(|&w| far(w) && far(w.reverse_bits() >> 1))
            .unwrap();
        let mut wiped = m.clone();
        for (i, (a, b)) in format_positions(21).into_iter().enumerate() {
            let bit = junk >> i & 1 == 1;
            wiped.set(a.0, a.1, bit);
            wiped.set(b.0, b.1, bit);
        }
        assert_eq!(decode_symbol(&wiped).unwrap_err(), QrError::BadFormatInfo);

        let mut trashed = m.clone();
        for i in 0..5 {
            for (x, y) in codeword_modules(1, i * 5) {
                trashed.toggle(x, y);
            }
        }
        assert_eq!(decode_symbol(&trashed).unwrap_err(), QrError::Uncorrectable);
    }

    #[test]
    fn non_byte_mode_is_rejected() {
        // Build a valid RS block whose mode nibble is numeric (0001).
        let shape = block_shape(1, EcLevel::L).unwrap();
        let mut data = data_codewords(b"12", &shape);
        data[0] = (data[0] & 0x0F) | 0x10;
        let mut cw = data.clone();
        cw.extend(rs_encode(&data, shape.ec_codewords).unwrap());
        let (mut m, func) = function_patterns(1);
        for (i, &(x, y)) in data_positions(&func).iter().take(cw.len() * 8).enumerate() {
            m.set(x, y, (cw[i / 8] >> (7 - i % 8)) & 1 == 1);
        }
        apply_mask(&mut m, &func, 0);
        draw_format_bits(&mut m, EcLevel::L, 0);
        assert!(matches!(
            decode_symbol(&m),
            Err(QrError::MalformedBitstream(_))
        ));
    }
}
