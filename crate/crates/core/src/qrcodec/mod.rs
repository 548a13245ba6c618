//! Byte-mode QR symbols, versions 1–6, with Reed–Solomon error correction.
//!
//! The decoder assumes a grid-aligned symbol at a known offset: there is no
//! finder search or perspective correction.

mod gf;
mod rs;
mod symbol;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gf::{gf_div, gf_inv, gf_mul, GfElement};
pub use rs::{rs_decode, rs_encode};
pub use symbol::{format_bits, penalty_score, qr_decode, qr_encode, symbol_side_for};

pub const MIN_VERSION: u8 = 1;
pub const MAX_VERSION: u8 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QrError {
    #[error("unsupported QR version {0} (1-6)")]
    Version(u8),
    #[error("mask pattern {0} out of range (0-7)")]
    Mask(u8),
    #[error("EC codeword count {0} out of range (1-254)")]
    EcCount(usize),
    #[error("block of {len} codewords cannot carry {ec_count} EC codewords")]
    BlockLength { len: usize, ec_count: usize },
    #[error("payload of {len} bytes exceeds capacity {capacity}")]
    Capacity { len: usize, capacity: usize },
    #[error("module grid of side {side} holds no symbol at border {border}")]
    Geometry { side: usize, border: usize },
    #[error("format information unrecoverable")]
    Format,
    #[error("too many errors to correct")]
    Uncorrectable,
    #[error("Reed-Solomon block {block} failed to decode")]
    Block { block: usize },
    #[error("malformed data segment: {0}")]
    Segment(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EcLevel {
    L,
    M,
    Q,
    H,
}

impl EcLevel {
    pub const ALL: [EcLevel; 4] = [EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H];

    /// Two-bit field used in the format information.
    pub fn format_bits(self) -> u16 {
        match self {
            EcLevel::L => 1,
            EcLevel::M => 0,
            EcLevel::Q => 3,
            EcLevel::H => 2,
        }
    }

    fn ordinal(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EcLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for EcLevel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L" => Ok(EcLevel::L),
            "M" => Ok(EcLevel::M),
            "Q" => Ok(EcLevel::Q),
            "H" => Ok(EcLevel::H),
            _ => Err(format!("unknown EC level `{s}` (expected L, M, Q or H)")),
        }
    }
}

// Per version 1..=6.
const RAW_CODEWORDS: [usize; 6] = [26, 44, 70, 100, 134, 172];
// Indexed [ec ordinal][version − 1].
const ECC_PER_BLOCK: [[usize; 6]; 4] = [
    [7, 10, 15, 20, 26, 18],
    [10, 16, 26, 18, 24, 16],
    [13, 22, 18, 26, 18, 24],
    [17, 28, 22, 16, 22, 28],
];
const BLOCKS: [[usize; 6]; 4] = [
    [1, 1, 1, 1, 1, 2],
    [1, 1, 1, 2, 2, 4],
    [1, 1, 2, 2, 4, 4],
    [1, 1, 2, 4, 4, 4],
];

/// Block structure for one (version, EC level).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    pub raw_codewords: usize,
    pub blocks: usize,
    pub ecc_per_block: usize,
}

impl BlockLayout {
    pub fn new(version: u8, ec: EcLevel) -> Result<Self, QrError> {
        check_version(version)?;
        let v = usize::from(version) - 1;
        Ok(Self {
            raw_codewords: RAW_CODEWORDS[v],
            blocks: BLOCKS[ec.ordinal()][v],
            ecc_per_block: ECC_PER_BLOCK[ec.ordinal()][v],
        })
    }

    pub fn data_codewords(&self) -> usize {
        self.raw_codewords - self.blocks * self.ecc_per_block
    }

    pub fn short_blocks(&self) -> usize {
        self.blocks - self.raw_codewords % self.blocks
    }

    /// Total length (data + EC) of a short block.
    pub fn short_block_len(&self) -> usize {
        self.raw_codewords / self.blocks
    }

    /// Data codewords in block `i`.
    pub fn block_data_len(&self, i: usize) -> usize {
        self.short_block_len() - self.ecc_per_block + usize::from(i >= self.short_blocks())
    }
}

fn check_version(version: u8) -> Result<(), QrError> {
    if (MIN_VERSION..=MAX_VERSION).contains(&version) {
        Ok(())
    } else {
        Err(QrError::Version(version))
    }
}

/// Symbol parameters. `mask: None` selects the lowest-penalty mask; `border`
/// light modules surround the symbol on every side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QrSpec {
    pub version: u8,
    pub ec: EcLevel,
    #[serde(default)]
    pub mask: Option<u8>,
    #[serde(default)]
    pub border: usize,
}

impl QrSpec {
    pub fn new(version: u8, ec: EcLevel) -> Result<Self, QrError> {
        check_version(version)?;
        Ok(Self {
            version,
            ec,
            mask: None,
            border: 0,
        })
    }

    pub fn with_mask(mut self, mask: u8) -> Result<Self, QrError> {
        if mask > 7 {
            return Err(QrError::Mask(mask));
        }
        self.mask = Some(mask);
        Ok(self)
    }

    pub fn with_border(mut self, border: usize) -> Self {
        self.border = border;
        self
    }

    pub fn validate(&self) -> Result<(), QrError> {
        check_version(self.version)?;
        match self.mask {
            Some(m) if m > 7 => Err(QrError::Mask(m)),
            _ => Ok(()),
        }
    }

    /// Symbol side without border, `4·version + 17`.
    pub fn side(&self) -> usize {
        4 * usize::from(self.version) + 17
    }

    pub fn total_side(&self) -> usize {
        self.side() + 2 * self.border
    }

    pub fn layout(&self) -> Result<BlockLayout, QrError> {
        BlockLayout::new(self.version, self.ec)
    }

    /// Largest byte-mode payload.
    pub fn capacity(&self) -> Result<usize, QrError> {
        // 4-bit mode + 8-bit count.
        Ok(self.layout()?.data_codewords() - 2)
    }
}
