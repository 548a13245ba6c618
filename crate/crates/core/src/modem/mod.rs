//! PSK constellations and the mapping between QR module grids and IRS frames.

mod constellation;
mod mapping;
mod modules;

use thiserror::Error;

pub use constellation::{bits_to_symbols, gray, gray_inverse, symbols_to_bits, Constellation};
pub use mapping::{
    apply_block_reduction, expand_slots, frames_to_modules, modules_to_frames, obstruction_mask,
    EncodedFrame, MappingPlan, Packing, ThetaFrame,
};
pub use modules::ModuleMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("unsupported PSK order {0}")]
    UnsupportedOrder(u32),
    #[error("{len} bits do not split into {bits_per_symbol}-bit symbols")]
    BitLength { len: usize, bits_per_symbol: usize },
    #[error("{modules} modules do not fit frames of {capacity} module capacity")]
    SizeMismatch { modules: usize, capacity: usize },
    #[error("invalid block partition: {0}")]
    BlockPartition(String),
    #[error("obstruction side {side} exceeds surface side {irs_side}")]
    Obstruction { side: usize, irs_side: usize },
    #[error("frame has {found} symbols, expected {expected}")]
    FrameLength { expected: usize, found: usize },
    #[error("got {found} frames, expected {expected}")]
    FrameCount { expected: usize, found: usize },
    #[error("symbol index {index} out of range for {order}-PSK")]
    SymbolIndex { index: usize, order: u32 },
    #[error("reflection coefficient of element {element} exceeds unit modulus")]
    Coefficient { element: usize },
    #[error("image is {width}x{height}, expected square")]
    NotSquare { width: usize, height: usize },
    #[error("malformed PBM: {0}")]
    Pbm(String),
}
