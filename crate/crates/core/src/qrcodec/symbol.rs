//! Symbol layout: function patterns, codeword placement, masking, format
//! information, and the grid-aligned reader.

use crate::modem::ModuleMatrix;

use super::rs::{rs_decode, rs_encode};
use super::{check_version, BlockLayout, EcLevel, QrError, QrSpec, MAX_VERSION, MIN_VERSION};

/// Working grid addressed as `(x, y)` = (column, row).
struct Grid {
    size: usize,
    dark: Vec<bool>,
    function: Vec<bool>,
}

impl Grid {
    fn new(version: u8) -> Self {
        let size = 4 * usize::from(version) + 17;
        let mut g = Self {
            size,
            dark: vec![false; size * size],
            function: vec![false; size * size],
        };
        g.draw_function_patterns(version);
        g
    }

    fn get(&self, x: usize, y: usize) -> bool {
        self.dark[y * self.size + x]
    }

    fn is_function(&self, x: usize, y: usize) -> bool {
        self.function[y * self.size + x]
    }

    fn set_function(&mut self, x: usize, y: usize, dark: bool) {
        self.dark[y * self.size + x] = dark;
        self.function[y * self.size + x] = true;
    }

    fn draw_function_patterns(&mut self, version: u8) {
        let size = self.size;
        for i in 0..size {
            self.set_function(6, i, i % 2 == 0);
            self.set_function(i, 6, i % 2 == 0);
        }
        self.draw_finder(3, 3);
        self.draw_finder(size - 4, 3);
        self.draw_finder(3, size - 4);
        // Versions up to 6 have a single alignment pattern; the other
        // candidate centres overlap the finders.
        if version >= 2 {
            self.draw_alignment(size - 7, size - 7);
        }
        // Reserve format areas and the dark module.
        self.draw_format(0);
    }

    fn draw_finder(&mut self, cx: usize, cy: usize) {
        for dy in -4i64..=4 {
            for dx in -4i64..=4 {
                let (x, y) = (cx as i64 + dx, cy as i64 + dy);
                if (0..self.size as i64).contains(&x) && (0..self.size as i64).contains(&y) {
                    let dist = dx.abs().max(dy.abs());
                    self.set_function(x as usize, y as usize, dist != 2 && dist != 4);
                }
            }
        }
    }

    fn draw_alignment(&mut self, cx: usize, cy: usize) {
        for dy in -2i64..=2 {
            for dx in -2i64..=2 {
                let (x, y) = ((cx as i64 + dx) as usize, (cy as i64 + dy) as usize);
                self.set_function(x, y, dx.abs().max(dy.abs()) != 1);
            }
        }
    }

    fn draw_format(&mut self, bits: u16) {
        let bit = |i: usize| (bits >> i) & 1 == 1;
        let size = self.size;
        for (i, (x, y)) in format_positions_primary().into_iter().enumerate() {
            self.set_function(x, y, bit(i));
        }
        for (i, (x, y)) in format_positions_secondary(size).into_iter().enumerate() {
            self.set_function(x, y, bit(i));
        }
        self.set_function(8, size - 8, true);
    }

    /// Zigzag traversal of the non-function modules.
    fn data_positions(&self) -> Vec<(usize, usize)> {
        let size = self.size;
        let mut out = Vec::new();
        let mut right = size as i64 - 1;
        while right >= 1 {
            if right == 6 {
                right = 5;
            }
            let upward = ((right + 1) & 2) == 0;
            for vert in 0..size {
                let y = if upward { size - 1 - vert } else { vert };
                for j in 0..2 {
                    let x = (right - j) as usize;
                    if !self.is_function(x, y) {
                        out.push((x, y));
                    }
                }
            }
            right -= 2;
        }
        out
    }

    fn apply_mask(&mut self, mask: u8) {
        for y in 0..self.size {
            for x in 0..self.size {
                if !self.is_function(x, y) && mask_condition(mask, x, y) {
                    self.dark[y * self.size + x] ^= true;
                }
            }
        }
    }

    fn to_modules(&self, border: usize) -> ModuleMatrix {
        ModuleMatrix::from_fn(self.size, |r, c| self.get(c, r)).with_border(border)
    }
}

/// Bit `i` of the 15-bit format word sits at position `i`.
fn format_positions_primary() -> [(usize, usize); 15] {
    let mut p = [(0, 0); 15];
    for (i, slot) in p.iter_mut().enumerate().take(6) {
        *slot = (8, i);
    }
    p[6] = (8, 7);
    p[7] = (8, 8);
    p[8] = (7, 8);
    for (i, slot) in p.iter_mut().enumerate().skip(9) {
        *slot = (14 - i, 8);
    }
    p
}

fn format_positions_secondary(size: usize) -> [(usize, usize); 15] {
    let mut p = [(0, 0); 15];
    for (i, slot) in p.iter_mut().enumerate() {
        *slot = if i < 8 {
            (size - 1 - i, 8)
        } else {
            (8, size - 15 + i)
        };
    }
    p
}

fn mask_condition(mask: u8, x: usize, y: usize) -> bool {
    match mask {
        0 => (x + y).is_multiple_of(2),
        1 => y.is_multiple_of(2),
        2 => x.is_multiple_of(3),
        3 => (x + y).is_multiple_of(3),
        4 => (x / 3 + y / 2).is_multiple_of(2),
        5 => x * y % 2 + x * y % 3 == 0,
        6 => (x * y % 2 + x * y % 3).is_multiple_of(2),
        _ => ((x + y) % 2 + x * y % 3).is_multiple_of(2),
    }
}

/// 15-bit format word: BCH(15,5) over `ec‖mask`, XOR `101010000010010`.
pub fn format_bits(ec: EcLevel, mask: u8) -> u16 {
    let data = (ec.format_bits() << 3) | u16::from(mask & 7);
    let mut rem = data;
    for _ in 0..10 {
        rem = (rem << 1) ^ ((rem >> 9) * 0x537);
    }
    ((data << 10) | (rem & 0x3FF)) ^ 0x5412
}

/// Penalty of a bare symbol (no border); lower is better.
pub fn penalty_score(m: &ModuleMatrix) -> u32 {
    let n = m.side();
    let mut score = 0u32;
    let line = |i: usize, j: usize, transpose: bool| if transpose { m.get(j, i) } else { m.get(i, j) };

    for transpose in [false, true] {
        for i in 0..n {
            // Runs of five or more.
            let mut run = 1;
            for j in 1..n {
                if line(i, j, transpose) == line(i, j - 1, transpose) {
                    run += 1;
                } else {
                    if run >= 5 {
                        score += 3 + (run - 5);
                    }
                    run = 1;
                }
            }
            if run >= 5 {
                score += 3 + (run - 5);
            }
            // Finder-like 1:1:3:1:1 with four light modules on one side.
            const A: [bool; 11] = [true, false, true, true, true, false, true, false, false, false, false];
            for j in 0..n.saturating_sub(10) {
                let w: Vec<bool> = (0..11).map(|k| line(i, j + k, transpose)).collect();
                if w.iter().eq(A.iter()) || w.iter().eq(A.iter().rev()) {
                    score += 40;
                }
            }
        }
    }
    for r in 0..n.saturating_sub(1) {
        for c in 0..n - 1 {
            let v = m.get(r, c);
            if v == m.get(r, c + 1) && v == m.get(r + 1, c) && v == m.get(r + 1, c + 1) {
                score += 3;
            }
        }
    }
    let total = n * n;
    if total > 0 {
        let dark = m.dark_count();
        let k = (dark * 20).abs_diff(total * 10) / total;
        score += 10 * k as u32;
    }
    score
}

fn data_codewords(payload: &[u8], layout: &BlockLayout) -> Vec<u8> {
    let capacity_bits = layout.data_codewords() * 8;
    let mut bits: Vec<bool> = Vec::with_capacity(capacity_bits);
    let push = |value: u32, len: usize, bits: &mut Vec<bool>| {
        for i in (0..len).rev() {
            bits.push((value >> i) & 1 == 1);
        }
    };
    push(0b0100, 4, &mut bits);
    push(payload.len() as u32, 8, &mut bits);
    for &b in payload {
        push(u32::from(b), 8, &mut bits);
    }
    let terminator = (capacity_bits - bits.len()).min(4);
    push(0, terminator, &mut bits);
    let pad = (8 - bits.len() % 8) % 8;
    push(0, pad, &mut bits);
    let mut bytes: Vec<u8> = bits
        .chunks(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b)))
        .collect();
    for pad in [0xEC, 0x11].into_iter().cycle() {
        if bytes.len() >= layout.data_codewords() {
            break;
        }
        bytes.push(pad);
    }
    bytes
}

fn interleave(data: &[u8], layout: &BlockLayout) -> Result<Vec<u8>, QrError> {
    let gap = layout.short_block_len() - layout.ecc_per_block;
    let mut blocks = Vec::with_capacity(layout.blocks);
    let mut k = 0;
    for i in 0..layout.blocks {
        let len = layout.block_data_len(i);
        let dat = &data[k..k + len];
        k += len;
        let mut block = dat.to_vec();
        if i < layout.short_blocks() {
            // Placeholder so every block has the same length.
            block.push(0);
        }
        block.extend(rs_encode(dat, layout.ecc_per_block)?);
        blocks.push(block);
    }
    let mut out = Vec::with_capacity(layout.raw_codewords);
    for i in 0..=layout.short_block_len() {
        for (j, block) in blocks.iter().enumerate() {
            if i != gap || j >= layout.short_blocks() {
                out.push(block[i]);
            }
        }
    }
    Ok(out)
}

/// Inverse of [`interleave`]: splits the codeword stream into blocks.
fn deinterleave(raw: &[u8], layout: &BlockLayout) -> Vec<Vec<u8>> {
    let gap = layout.short_block_len() - layout.ecc_per_block;
    let mut blocks = vec![Vec::with_capacity(layout.short_block_len() + 1); layout.blocks];
    let mut it = raw.iter().copied();
    for i in 0..=layout.short_block_len() {
        for (j, block) in blocks.iter_mut().enumerate() {
            if i != gap || j >= layout.short_blocks() {
                block.push(it.next().unwrap_or(0));
            }
        }
    }
    blocks
}

fn build_symbol(payload: &[u8], spec: &QrSpec, mask: u8) -> Result<Grid, QrError> {
    let layout = spec.layout()?;
    let codewords = interleave(&data_codewords(payload, &layout), &layout)?;
    let mut g = Grid::new(spec.version);
    for (i, (x, y)) in g.data_positions().into_iter().enumerate() {
        // Remainder bits stay light.
        let dark = codewords
            .get(i / 8)
            .is_some_and(|&b| (b >> (7 - i % 8)) & 1 == 1);
        g.dark[y * g.size + x] = dark;
    }
    g.apply_mask(mask);
    g.draw_format(format_bits(spec.ec, mask));
    Ok(g)
}

/// Encodes `payload` in byte mode.
pub fn qr_encode(payload: &[u8], spec: &QrSpec) -> Result<ModuleMatrix, QrError> {
    spec.validate()?;
    let capacity = spec.capacity()?;
    if payload.len() > capacity {
        return Err(QrError::Capacity {
            len: payload.len(),
            capacity,
        });
    }
    let grid = match spec.mask {
        Some(m) => build_symbol(payload, spec, m)?,
        None => {
            let mut best: Option<(u32, Grid)> = None;
            for m in 0..8 {
                let g = build_symbol(payload, spec, m)?;
                let p = penalty_score(&g.to_modules(0));
                if best.as_ref().is_none_or(|(bp, _)| p < *bp) {
                    best = Some((p, g));
                }
            }
            best.expect("eight candidates").1
        }
    };
    Ok(grid.to_modules(spec.border))
}

/// Symbol side located in a grid of side `side` with the symbol's top-left
/// corner at `(border, border)`: a symmetric fit `side − 2·border` if that
/// is a valid side, else the largest valid side not exceeding `side − border`.
pub fn symbol_side_for(side: usize, border: usize) -> Option<usize> {
    let valid = |s: usize| {
        s >= 21 && (s - 17).is_multiple_of(4) && (MIN_VERSION..=MAX_VERSION).contains(&(((s - 17) / 4) as u8))
    };
    if let Some(s) = side.checked_sub(2 * border).filter(|&s| valid(s)) {
        return Some(s);
    }
    let avail = side.checked_sub(border)?;
    (MIN_VERSION..=MAX_VERSION)
        .rev()
        .map(|v| 4 * usize::from(v) + 17)
        .find(|&s| s <= avail)
}

fn read_format(g: &Grid) -> Result<(EcLevel, u8), QrError> {
    let read = |positions: &[(usize, usize)]| {
        positions
            .iter()
            .enumerate()
            .fold(0u16, |acc, (i, &(x, y))| acc | (u16::from(g.get(x, y)) << i))
    };
    let copies = [
        read(&format_positions_primary()),
        read(&format_positions_secondary(g.size)),
    ];
    // Ties go to the primary copy.
    let mut best: Option<(u32, EcLevel, u8)> = None;
    for c in copies {
        for ec in EcLevel::ALL {
            for mask in 0..8 {
                let d = (format_bits(ec, mask) ^ c).count_ones();
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, ec, mask));
                }
            }
        }
    }
    match best {
        Some((d, ec, mask)) if d <= 3 => Ok((ec, mask)),
        _ => Err(QrError::Format),
    }
}

fn parse_segment(data: &[u8]) -> Result<Vec<u8>, QrError> {
    let bit = |i: usize| (data[i / 8] >> (7 - i % 8)) & 1 == 1;
    let read = |start: usize, len: usize| (start..start + len).fold(0usize, |acc, i| (acc << 1) | usize::from(bit(i)));
    let total = data.len() * 8;
    if total < 4 {
        return Err(QrError::Segment("stream too short".into()));
    }
    match read(0, 4) {
        0b0000 => Ok(Vec::new()),
        0b0100 => {
            if total < 12 {
                return Err(QrError::Segment("missing character count".into()));
            }
            let count = read(4, 8);
            if 12 + 8 * count > total {
                return Err(QrError::Segment(format!("count {count} overruns the data")));
            }
            Ok((0..count).map(|k| read(12 + 8 * k, 8) as u8).collect())
        }
        mode => Err(QrError::Segment(format!("unsupported mode indicator {mode:04b}"))),
    }
}

/// Decodes a grid-aligned symbol whose top-left corner is at
/// `(border, border)`.
pub fn qr_decode(m: &ModuleMatrix, border: usize) -> Result<Vec<u8>, QrError> {
    let geometry = QrError::Geometry {
        side: m.side(),
        border,
    };
    let side = symbol_side_for(m.side(), border).ok_or(geometry.clone())?;
    let symbol = m.crop(border, border, side).ok_or(geometry)?;
    let version = ((side - 17) / 4) as u8;
    check_version(version)?;

    let mut g = Grid::new(version);
    for y in 0..side {
        for x in 0..side {
            g.dark[y * side + x] = symbol.get(y, x);
        }
    }
    let (ec, mask) = read_format(&g)?;
    g.apply_mask(mask);

    let layout = BlockLayout::new(version, ec)?;
    let positions = g.data_positions();
    let mut raw = vec![0u8; layout.raw_codewords];
    for (i, &(x, y)) in positions.iter().take(layout.raw_codewords * 8).enumerate() {
        if g.get(x, y) {
            raw[i / 8] |= 1 << (7 - i % 8);
        }
    }

    let mut data = Vec::with_capacity(layout.data_codewords());
    for (j, block) in deinterleave(&raw, &layout).iter().enumerate() {
        let (d, _) = rs_decode(block, layout.ecc_per_block).map_err(|_| QrError::Block { block: j })?;
        data.extend(d);
    }
    parse_segment(&data)
}
