//! Square binary module grids and their plain-text PBM (P1) form.

use std::fmt::Write as _;

use super::MappingError;

/// `n × n` grid of QR modules; `true` is dark.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModuleMatrix {
    side: usize,
    cells: Vec<bool>,
}

impl ModuleMatrix {
    pub fn new(side: usize) -> Self {
        Self {
            side,
            cells: vec![false; side * side],
        }
    }

    pub fn from_cells(side: usize, cells: Vec<bool>) -> Result<Self, MappingError> {
        if cells.len() != side * side {
            return Err(MappingError::SizeMismatch {
                modules: cells.len(),
                capacity: side * side,
            });
        }
        Ok(Self { side, cells })
    }

    pub fn from_fn(side: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut cells = Vec::with_capacity(side * side);
        for r in 0..side {
            for c in 0..side {
                cells.push(f(r, c));
            }
        }
        Self { side, cells }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.side + col]
    }

    pub fn set(&mut self, row: usize, col: usize, dark: bool) {
        self.cells[row * self.side + col] = dark;
    }

    /// Row-major cells.
    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn dark_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Number of positions where `self` and `other` differ; `None` if sizes differ.
    pub fn hamming(&self, other: &ModuleMatrix) -> Option<usize> {
        (self.side == other.side)
            .then(|| self.cells.iter().zip(&other.cells).filter(|(a, b)| a != b).count())
    }

    /// Surrounds the grid with `border` light modules on every side.
    pub fn with_border(&self, border: usize) -> ModuleMatrix {
        let side = self.side + 2 * border;
        ModuleMatrix::from_fn(side, |r, c| {
            r >= border
                && c >= border
                && r < border + self.side
                && c < border + self.side
                && self.get(r - border, c - border)
        })
    }

    /// Pads with `pad` light modules on the bottom and right only.
    pub fn pad_bottom_right(&self, pad: usize) -> ModuleMatrix {
        ModuleMatrix::from_fn(self.side + pad, |r, c| r < self.side && c < self.side && self.get(r, c))
    }

    /// Square sub-grid starting at `(top, left)`; `None` if out of range.
    pub fn crop(&self, top: usize, left: usize, side: usize) -> Option<ModuleMatrix> {
        (top + side <= self.side && left + side <= self.side)
            .then(|| ModuleMatrix::from_fn(side, |r, c| self.get(top + r, left + c)))
    }

    /// Plain PBM: `P1`, dimensions, then one line of `0`/`1` per row.
    pub fn to_pbm(&self) -> String {
        let mut out = String::with_capacity(self.side * (self.side + 1) + 16);
        let _ = writeln!(out, "P1\n{} {}", self.side, self.side);
        for row in self.cells.chunks(self.side.max(1)) {
            out.extend(row.iter().map(|&d| if d { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    /// Parses a plain PBM. Whitespace between pixels is optional and `#`
    /// comments are skipped; the image must be square.
    pub fn from_pbm(text: &str) -> Result<Self, MappingError> {
        let err = |m: &str| MappingError::Pbm(m.to_string());
        let mut chars = text.chars().peekable();

        let mut header = Vec::new();
        let mut token = String::new();
        while header.len() < 3 {
            match chars.next() {
                Some('#') => {
                    for c in chars.by_ref() {
                        if c == '\n' {
                            break;
                        }
                    }
                    if !token.is_empty() {
                        header.push(std::mem::take(&mut token));
                    }
                }
                Some(c) if c.is_ascii_whitespace() => {
                    if !token.is_empty() {
                        header.push(std::mem::take(&mut token));
                    }
                }
                Some(c) => {
                    if token.len() > 20 {
                        return Err(err("header token too long"));
                    }
                    token.push(c);
                }
                None => {
                    if !token.is_empty() {
                        header.push(std::mem::take(&mut token));
                    }
                    if header.len() < 3 {
                        return Err(err("truncated header"));
                    }
                }
            }
        }
        if header[0] != "P1" {
            return Err(err("missing P1 magic"));
        }
        let width: usize = header[1].parse().map_err(|_| err("bad width"))?;
        let height: usize = header[2].parse().map_err(|_| err("bad height"))?;
        if width != height {
            return Err(MappingError::NotSquare { width, height });
        }
        let count = width
            .checked_mul(height)
            .filter(|&n| n <= 1 << 24)
            .ok_or_else(|| err("image too large"))?;

        let mut cells = Vec::with_capacity(count);
        while let Some(c) = chars.next() {
            match c {
                '0' | '1' if cells.len() < count => cells.push(c == '1'),
                '0' | '1' => return Err(err("trailing pixel data")),
                '#' => {
                    for c in chars.by_ref() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                c if c.is_ascii_whitespace() => {}
                _ => return Err(err("unexpected character in pixel data")),
            }
        }
        if cells.len() != count {
            return Err(err("truncated pixel data"));
        }
        Ok(Self { side: width, cells })
    }
}

impl std::fmt::Debug for ModuleMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ModuleMatrix {}x{}", self.side, self.side)?;
        for row in self.cells.chunks(self.side.max(1)) {
            let line: String = row.iter().map(|&d| if d { '#' } else { '.' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
