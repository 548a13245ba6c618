//! Placement of QR modules onto IRS reflection frames.
//!
//! The IRS is a square grid of `irs_side²` elements. Without block reduction
//! every element is one symbol slot; with `block_count = N_r` the grid is cut
//! into `N_r` equal square blocks and each block is one slot whose elements
//! all reflect the same coefficient. A slot carries `log₂M` modules.
//!
//! When `log₂M` is a perfect square and the module grid is exactly
//! `slot_side·√log₂M` wide, slot `(i, j)` carries the aligned
//! `√log₂M × √log₂M` sub-block of modules (row-major bit order). Otherwise the
//! modules are read row-major into a bit stream that fills slots row-major,
//! frame after frame.

use num_complex::Complex64;

use super::{Constellation, MappingError, ModuleMatrix};

/// Reflection coefficients for one displayed frame, `|θ_l| ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaFrame {
    theta: Vec<Complex64>,
}

impl ThetaFrame {
    pub fn new(theta: Vec<Complex64>) -> Result<Self, MappingError> {
        if let Some(l) = theta.iter().position(|t| !(t.norm() <= 1.0 + 1e-12)) {
            return Err(MappingError::Coefficient { element: l });
        }
        Ok(Self { theta })
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// A frame together with the constellation indices of its slots.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedFrame {
    pub indices: Vec<usize>,
    pub theta: ThetaFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Packing {
    /// Each slot carries an aligned `side × side` sub-block of modules.
    SubBlock { side: usize },
    /// Modules are streamed row-major across slots and frames.
    RowMajor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingPlan {
    irs_side: usize,
    module_side: usize,
    bits_per_symbol: usize,
    block_count: Option<usize>,
    obstruction_side: usize,
    packing: Packing,
    frames: usize,
}

fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

impl MappingPlan {
    /// Plan for an `irs_side × irs_side` surface showing a `module_side`-wide
    /// module grid. `block_count` enables block reduction.
    pub fn new(
        irs_side: usize,
        module_side: usize,
        c: &Constellation,
        block_count: Option<usize>,
    ) -> Result<Self, MappingError> {
        if irs_side == 0 || module_side == 0 {
            return Err(MappingError::SizeMismatch {
                modules: module_side * module_side,
                capacity: irs_side * irs_side,
            });
        }
        let elements = irs_side * irs_side;
        let slot_side = match block_count {
            None => irs_side,
            Some(b) => {
                let side = exact_sqrt(b).filter(|&s| s > 0).ok_or_else(|| {
                    MappingError::BlockPartition(format!("{b} blocks do not form a square grid"))
                })?;
                if !irs_side.is_multiple_of(side) {
                    return Err(MappingError::BlockPartition(format!(
                        "a {irs_side}x{irs_side} surface cannot be cut into {b} equal square blocks"
                    )));
                }
                side
            }
        };
        let block_count = block_count.filter(|&b| b != elements);
        let k = c.bits_per_symbol();
        let slots = slot_side * slot_side;
        let modules = module_side * module_side;
        let (packing, frames) = match exact_sqrt(k) {
            Some(q) if module_side == slot_side * q => (Packing::SubBlock { side: q }, 1),
            _ => {
                let capacity = slots * k;
                if !modules.is_multiple_of(capacity) {
                    return Err(MappingError::SizeMismatch { modules, capacity });
                }
                (Packing::RowMajor, modules / capacity)
            }
        };
        Ok(Self {
            irs_side,
            module_side,
            bits_per_symbol: k,
            block_count,
            obstruction_side: 0,
            packing,
            frames,
        })
    }

    pub fn with_obstruction(mut self, side: usize) -> Result<Self, MappingError> {
        if side > self.irs_side {
            return Err(MappingError::Obstruction {
                side,
                irs_side: self.irs_side,
            });
        }
        self.obstruction_side = side;
        Ok(self)
    }

    pub fn irs_side(&self) -> usize {
        self.irs_side
    }

    pub fn elements(&self) -> usize {
        self.irs_side * self.irs_side
    }

    pub fn module_side(&self) -> usize {
        self.module_side
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn block_count(&self) -> Option<usize> {
        self.block_count
    }

    pub fn obstruction_side(&self) -> usize {
        self.obstruction_side
    }

    pub fn packing(&self) -> Packing {
        self.packing
    }

    pub fn frame_count(&self) -> usize {
        self.frames
    }

    /// Side of the slot grid.
    pub fn slot_side(&self) -> usize {
        match self.block_count {
            Some(b) => exact_sqrt(b).expect("validated"),
            None => self.irs_side,
        }
    }

    /// Symbols per frame.
    pub fn slots(&self) -> usize {
        let s = self.slot_side();
        s * s
    }

    /// Side of one block in elements (1 without block reduction).
    pub fn block_side(&self) -> usize {
        self.irs_side / self.slot_side()
    }

    /// Slot carried by element `l` (row-major element index).
    pub fn slot_of_element(&self, l: usize) -> usize {
        let bs = self.block_side();
        let (r, c) = (l / self.irs_side, l % self.irs_side);
        (r / bs) * self.slot_side() + c / bs
    }

    /// Element-to-slot map for the whole surface.
    pub fn slot_map(&self) -> Vec<usize> {
        (0..self.elements()).map(|l| self.slot_of_element(l)).collect()
    }

    fn check_constellation(&self, c: &Constellation) -> Result<(), MappingError> {
        if c.bits_per_symbol() != self.bits_per_symbol {
            return Err(MappingError::UnsupportedOrder(c.order()));
        }
        Ok(())
    }
}

/// Expands per-slot constellation indices to per-element coefficients.
pub fn expand_slots(
    indices: &[usize],
    plan: &MappingPlan,
    c: &Constellation,
) -> Result<ThetaFrame, MappingError> {
    if indices.len() != plan.slots() {
        return Err(MappingError::FrameLength {
            expected: plan.slots(),
            found: indices.len(),
        });
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= c.order() as usize) {
        return Err(MappingError::SymbolIndex {
            index: bad,
            order: c.order(),
        });
    }
    let theta = (0..plan.elements())
        .map(|l| c.point(indices[plan.slot_of_element(l)]))
        .collect();
    ThetaFrame::new(theta)
}

/// Maps a module grid onto the minimal sequence of frames.
pub fn modules_to_frames(
    m: &ModuleMatrix,
    plan: &MappingPlan,
    c: &Constellation,
) -> Result<Vec<EncodedFrame>, MappingError> {
    plan.check_constellation(c)?;
    if m.side() != plan.module_side() {
        return Err(MappingError::SizeMismatch {
            modules: m.side() * m.side(),
            capacity: plan.module_side() * plan.module_side(),
        });
    }
    let k = plan.bits_per_symbol();
    let slots = plan.slots();
    let symbol_indices: Vec<usize> = match plan.packing() {
        Packing::SubBlock { side: q } => {
            let ss = plan.slot_side();
            let mut bits = Vec::with_capacity(k);
            (0..slots)
                .map(|s| {
                    let (sr, sc) = (s / ss, s % ss);
                    bits.clear();
                    for i in 0..q {
                        for j in 0..q {
                            bits.push(m.get(sr * q + i, sc * q + j));
                        }
                    }
                    c.index_of_bits(&bits)
                })
                .collect()
        }
        Packing::RowMajor => m.cells().chunks(k).map(|g| c.index_of_bits(g)).collect(),
    };
    symbol_indices
        .chunks(slots)
        .map(|chunk| {
            Ok(EncodedFrame {
                indices: chunk.to_vec(),
                theta: expand_slots(chunk, plan, c)?,
            })
        })
        .collect()
}

/// Reassembles the module grid from detected slot indices, frame by frame.
pub fn frames_to_modules(
    frames: &[Vec<usize>],
    plan: &MappingPlan,
    c: &Constellation,
) -> Result<ModuleMatrix, MappingError> {
    plan.check_constellation(c)?;
    if frames.len() != plan.frame_count() {
        return Err(MappingError::FrameCount {
            expected: plan.frame_count(),
            found: frames.len(),
        });
    }
    for f in frames {
        if f.len() != plan.slots() {
            return Err(MappingError::FrameLength {
                expected: plan.slots(),
                found: f.len(),
            });
        }
        if let Some(&bad) = f.iter().find(|&&i| i >= c.order() as usize) {
            return Err(MappingError::SymbolIndex {
                index: bad,
                order: c.order(),
            });
        }
    }
    let n = plan.module_side();
    let mut out = ModuleMatrix::new(n);
    match plan.packing() {
        Packing::SubBlock { side: q } => {
            let ss = plan.slot_side();
            for (s, &idx) in frames[0].iter().enumerate() {
                let (sr, sc) = (s / ss, s % ss);
                for (b, bit) in c.label_bits(idx).enumerate() {
                    out.set(sr * q + b / q, sc * q + b % q, bit);
                }
            }
        }
        Packing::RowMajor => {
            let bits = frames.iter().flatten().flat_map(|&idx| c.label_bits(idx));
            for (pos, bit) in bits.enumerate() {
                out.set(pos / n, pos % n, bit);
            }
        }
    }
    Ok(out)
}

/// Single-frame block-reduced display: every element of block `b` reflects
/// block `b`'s symbol. With `block_count == L` this is plain
/// [`modules_to_frames`].
pub fn apply_block_reduction(
    m: &ModuleMatrix,
    plan: &MappingPlan,
    c: &Constellation,
) -> Result<ThetaFrame, MappingError> {
    let mut frames = modules_to_frames(m, plan, c)?;
    if frames.len() != 1 {
        return Err(MappingError::FrameCount {
            expected: 1,
            found: frames.len(),
        });
    }
    Ok(frames.remove(0).theta)
}

/// Elements inside the `D × D` square at the bottom-right corner.
pub fn obstruction_mask(plan: &MappingPlan) -> Vec<bool> {
    let n = plan.irs_side();
    let start = n - plan.obstruction_side();
    (0..n * n)
        .map(|l| l / n >= start && l % n >= start)
        .collect()
}
