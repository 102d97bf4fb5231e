use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Square grid of modules, `true` = dark. Coordinates are `(x, y)` with `x`
/// the column and `y` the row, origin top-left.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    size: usize,
    bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixParseError {
    #[error("missing size line")]
    MissingSize,
    #[error("bad size line {0:?}")]
    BadSize(String),
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row}: expected {expected} modules, found {found}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: unexpected character {ch:?}")]
    BadCharacter { row: usize, ch: char },
}

impl BitMatrix {
    pub fn new(size: usize) -> Self {
        BitMatrix {
            size,
            bits: vec![false; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Version implied by the side length, if it is one of 1..=3.
    pub fn version(&self) -> Option<u8> {
        match self.size {
            21 => Some(1),
            25 => Some(2),
            29 => Some(3),
            _ => None,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.size + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, dark: bool) {
        self.bits[y * self.size + x] = dark;
    }

    #[inline]
    pub fn toggle(&mut self, x: usize, y: usize) {
        let i = y * self.size + x;
        self.bits[i] = !self.bits[i];
    }

    pub fn dark_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Applies `sym` to the grid.
    pub fn transformed(&self, sym: Symmetry) -> BitMatrix {
        let n = self.size;
        let mut out = BitMatrix::new(n);
        for y in 0..n {
            for x in 0..n {
                let (tx, ty) = sym.map(x, y, n);
                out.set(tx, ty, self.get(x, y));
            }
        }
        out
    }

    /// Text form: the size on the first line, then one line per row of `#`
    /// (dark) and `.` (light).
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.size + 1) * (self.size + 1) + 4);
        out.push_str(&self.size.to_string());
        out.push('\n');
        for y in 0..self.size {
            out.extend((0..self.size).map(|x| if self.get(x, y) { '#' } else { '.' }));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<BitMatrix, MatrixParseError> {
        let mut lines = text.lines().map(str::trim_end).filter(|l| !l.is_empty());
        let size_line = lines.next().ok_or(MatrixParseError::MissingSize)?;
        let size: usize = size_line
            .trim()
            .parse()
            .ok()
            .filter(|&s| s > 0)
            .ok_or_else(|| MatrixParseError::BadSize(size_line.to_owned()))?;
        let rows: Vec<&str> = lines.collect();
        if rows.len() != size {
            return Err(MatrixParseError::RowCount {
                expected: size,
                found: rows.len(),
            });
        }
        let mut m = BitMatrix::new(size);
        for (y, row) in rows.iter().enumerate() {
            let width = row.chars().count();
            if width != size {
                return Err(MatrixParseError::RowWidth {
                    row: y + 1,
                    expected: size,
                    found: width,
                });
            }
            for (x, ch) in row.chars().enumerate() {
                match ch {
                    '#' => m.set(x, y, true),
                    '.' => {}
                    ch => return Err(MatrixParseError::BadCharacter { row: y + 1, ch }),
                }
            }
        }
        Ok(m)
    }

    /// Terminal rendering with a light quiet zone, two characters per module.
    pub fn to_ascii_art(&self, quiet_zone: usize) -> String {
        let span = self.size + 2 * quiet_zone;
        let mut out = String::new();
        for y in 0..span {
            for x in 0..span {
                let dark = x >= quiet_zone
                    && y >= quiet_zone
                    && x - quiet_zone < self.size
                    && y - quiet_zone < self.size
                    && self.get(x - quiet_zone, y - quiet_zone);
                out.push_str(if dark { "██" } else { "  " });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The eight symmetries of the square. Rotations are clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Symmetry {
    Identity,
    Rot90,
    Rot180,
    Rot270,
    FlipHorizontal,
    FlipVertical,
    Transpose,
    AntiTranspose,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::Identity,
        Symmetry::Rot90,
        Symmetry::Rot180,
        Symmetry::Rot270,
        Symmetry::FlipHorizontal,
        Symmetry::FlipVertical,
        Symmetry::Transpose,
        Symmetry::AntiTranspose,
    ];

    /// Where module `(x, y)` lands in an `n`-sided grid.
    pub fn map(self, x: usize, y: usize, n: usize) -> (usize, usize) {
        let m = n - 1;
        match self {
            Symmetry::Identity => (x, y),
            Symmetry::Rot90 => (m - y, x),
            Symmetry::Rot180 => (m - x, m - y),
            Symmetry::Rot270 => (y, m - x),
            Symmetry::FlipHorizontal => (m - x, y),
            Symmetry::FlipVertical => (x, m - y),
            Symmetry::Transpose => (y, x),
            Symmetry::AntiTranspose => (m - y, m - x),
        }
    }

    pub fn inverse(self) -> Symmetry {
        match self {
            Symmetry::Rot90 => Symmetry::Rot270,
            Symmetry::Rot270 => Symmetry::Rot90,
            s => s,
        }
    }
}
